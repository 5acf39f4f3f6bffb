use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use fbpme::estimates::fit_model_constant;
use fbpme::io::fmt_f64;
use fbpme::solver::time_march;
use fbpme::wellposedness::{admissible, blowup_monitor, local_time_bound, select_lambda, smallness_check};
use fbpme::{build_partition, Exponent, ModelParams, SolverConfig};

use crate::config::{parse_json, ExponentValue, GridConfig, InitialConfig, PressureConfig};
use crate::init::initial_field;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    #[serde(default = "default_cases")]
    pub cases: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_cases() -> usize {
    16
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub grid: GridConfig,
    pub alpha: Vec<f64>,
    pub pressure: Vec<PressureConfig>,
    pub p: Vec<ExponentValue>,
    pub q: Vec<ExponentValue>,
    #[serde(default = "default_amplitudes")]
    pub amplitude: Vec<f64>,
    /// Amplitude is taken from the sweep axis.
    pub initial_data: InitialConfig,
    /// Fixed constant; fitted per point when absent.
    #[serde(default)]
    pub c_fit: Option<f64>,
    #[serde(default)]
    pub fit: Option<FitConfig>,
    /// Runs stop at `min(T_bound, t_max)`.
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default)]
    pub dt: Option<f64>,
}

fn default_amplitudes() -> Vec<f64> {
    vec![1.0]
}
fn default_t_max() -> f64 {
    1.0
}

pub const COLUMNS: [&str; 15] = [
    "n",
    "p",
    "q",
    "alpha",
    "sigma",
    "r",
    "beta",
    "admissible_thm31",
    "admissible_sec4",
    "smallness_pass",
    "T_bound",
    "final_status",
    "amplitude",
    "c_fit",
    "pressure",
];

struct Point<'a> {
    alpha: f64,
    pressure: &'a PressureConfig,
    p: ExponentValue,
    q: ExponentValue,
    amplitude: f64,
}

fn fmt_exp(e: Exponent) -> String {
    if e.is_infinite() {
        "inf".into()
    } else {
        fmt_f64(e.value())
    }
}

fn run_point(cfg: &SweepConfig, base: &Path, pt: &Point) -> Result<Vec<String>> {
    let grid = cfg.grid.build()?;
    let partition = build_partition(&grid)?;
    let pressure = pt.pressure.build(&grid, base)?;
    let name = pressure.name();
    let (p, q) = (pt.p.to_exponent()?, pt.q.to_exponent()?);
    let params = ModelParams::new(pt.alpha, pressure, grid.dim(), p, q)?;
    let r = Exponent::TWO;
    let report = admissible(grid.dim(), p, pt.alpha, params.sigma(), r);
    let c_fit = match cfg.c_fit {
        Some(c) => c,
        None => {
            let fit = cfg.fit.clone().unwrap_or(FitConfig { cases: default_cases(), seed: 0 });
            fit_model_constant(grid, &params, 1.0, fit.cases, fit.seed)?.0
        }
    };
    let mut init = cfg.initial_data.clone();
    init.amplitude = pt.amplitude;
    let u0 = initial_field(&init, grid, base)?;
    let small = smallness_check(&u0, &params, c_fit, &partition)?;
    let t_bound = if small.norm == 0.0 {
        f64::INFINITY
    } else {
        let lambda = select_lambda(&u0, &params, c_fit, &partition)?;
        local_time_bound(small.norm, lambda, pt.alpha, c_fit, r)?.two
    };
    let mut solver = SolverConfig::new(t_bound.min(cfg.t_max));
    solver.dt = cfg.dt;
    let out = time_march(&u0, &params, &solver)?;
    let monitor = blowup_monitor(&out.record, &params, out.status.is_blown())?;
    Ok(vec![
        grid.dim().to_string(),
        fmt_exp(p),
        fmt_exp(q),
        fmt_f64(pt.alpha),
        fmt_f64(params.sigma()),
        fmt_exp(r),
        fmt_f64(report.beta),
        report.admissible_r2.to_string(),
        report.admissible_improved.to_string(),
        small.pass.to_string(),
        fmt_f64(t_bound),
        monitor.status.label().to_string(),
        fmt_f64(pt.amplitude),
        fmt_f64(c_fit),
        name.to_string(),
    ])
}

/// Rows of the Cartesian product, computed in parallel and returned in axis order.
pub fn sweep_rows(cfg: &SweepConfig, base: &Path) -> Result<Vec<Vec<String>>> {
    let mut points = Vec::new();
    for &alpha in &cfg.alpha {
        for pressure in &cfg.pressure {
            for &p in &cfg.p {
                for &q in &cfg.q {
                    for &amplitude in &cfg.amplitude {
                        points.push(Point { alpha, pressure, p, q, amplitude });
                    }
                }
            }
        }
    }
    points
        .par_iter()
        .enumerate()
        .map(|(i, pt)| run_point(cfg, base, pt).with_context(|| format!("sweep point {i} (alpha={})", pt.alpha)))
        .collect()
}

pub fn cmd_sweep(config_path: &Path, w: impl Write) -> Result<usize> {
    let text = std::fs::read_to_string(config_path).with_context(|| format!("reading {}", config_path.display()))?;
    let cfg: SweepConfig = parse_json(&text, "sweep config")?;
    let base = config_path.parent().map(Path::to_path_buf).unwrap_or_default();
    let rows = sweep_rows(&cfg, &base)?;
    let mut out = csv::Writer::from_writer(w);
    out.write_record(COLUMNS)?;
    for row in &rows {
        out.write_record(row)?;
    }
    out.flush()?;
    Ok(rows.len())
}
