use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use fbpme::Exponent;
use fbpme_cli::verify::{run_suites, write_table, Suite, VerifyOptions};
use fbpme_cli::{analyze, run, sweep};

#[derive(Parser)]
#[command(name = "fbpme", version, about = "Fractional porous medium solver on a periodic Fourier grid")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve from a JSON config and write trajectory, snapshots and metadata.
    Run { config: PathBuf },
    /// Randomized checks of the linear, interpolation and bilinear inequalities.
    Verify {
        #[arg(value_enum, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long = "points", short = 'N', default_value_t = 64)]
        points: usize,
        #[arg(long, default_value_t = 2.25)]
        alpha: f64,
        /// Order of the Riesz pressure.
        #[arg(long, default_value_t = 0.5)]
        s: f64,
        #[arg(long, default_value_t = 24)]
        cases: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the table here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Admissibility, smallness and local-time table over a parameter grid.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute a Fourier–Besov series and mixed norms from a stored trajectory.
    Analyze {
        trajectory: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
        #[arg(long)]
        p: Exponent,
        #[arg(long)]
        q: Exponent,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn writer(out: &Option<PathBuf>) -> Result<Box<dyn std::io::Write>> {
    Ok(match out {
        Some(p) => Box::new(std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run { config } => {
            let s = run::cmd_run(&config)?;
            println!("status: {}, monitor: {}", s.status, s.monitor);
        }
        Command::Verify { suite, dim, points, alpha, s, cases, seed, out } => {
            let rows = run_suites(suite, &VerifyOptions { dim, points, alpha, riesz_s: s, cases, seed })?;
            write_table(&rows, writer(&out)?)?;
            if rows.iter().any(|r| !r.pass) {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Sweep { config, out } => {
            let n = sweep::cmd_sweep(&config, writer(&out)?)?;
            log::info!("wrote {n} sweep rows");
        }
        Command::Analyze { trajectory, beta, p, q, out } => {
            let o = analyze::cmd_analyze(&trajectory, beta, p, q, out.as_deref())?;
            if let Some(d) = o.stored_drift {
                eprintln!("stored column matched with relative drift {d:.3e}");
            }
            println!("{}\n{}", o.trajectory.display(), o.mixed.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Ok(v) = std::env::var("FBPME_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            }
            _ => {
                eprintln!("error: FBPME_THREADS must be a positive integer, got {v:?}");
                return ExitCode::from(2);
            }
        }
    }
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
