use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use fbpme::io::{fmt_f64, read_trajectory_csv, write_trajectory_csv};
use fbpme::record::{mixed_norm, plain_mixed_norm};
use fbpme::{Exponent, FBNormParams};

use crate::output::write_atomic;

pub struct AnalyzeOutcome {
    pub trajectory: PathBuf,
    pub mixed: PathBuf,
    /// Largest change against a stored column with the same `(β, q)`, if there was one.
    pub stored_drift: Option<f64>,
}

fn default_out(traj: &Path) -> PathBuf {
    let stem = traj.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "trajectory".into());
    traj.with_file_name(format!("{stem}_analyzed.csv"))
}

/// Adds the `FB^β_{p,q}` series recomputed from stored block norms, plus Chemin–Lerner and
/// Bochner norms for `r ∈ {1, 2, ∞}`.
pub fn cmd_analyze(traj: &Path, beta: f64, p: Exponent, q: Exponent, out: Option<&Path>) -> Result<AnalyzeOutcome> {
    let file = File::open(traj).with_context(|| format!("opening {}", traj.display()))?;
    let mut rec = read_trajectory_csv(BufReader::new(file)).with_context(|| format!("reading {}", traj.display()))?;
    if p != rec.p {
        bail!("the trajectory stores block norms in L^{}, cannot analyze with p = {p}", rec.p);
    }
    let params = FBNormParams::new(beta, p, q);
    let fresh = rec.fb_series(params)?;
    let mut stored_drift = None;
    match rec.fb_norms.iter_mut().find(|s| s.params == params) {
        Some(s) => {
            let drift = s
                .values
                .iter()
                .zip(&fresh)
                .map(|(a, b)| (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE))
                .fold(0.0, f64::max);
            stored_drift = Some(drift);
            s.values = fresh;
        }
        None => rec.push_fb_series(params)?,
    }

    let out_path = out.map(Path::to_path_buf).unwrap_or_else(|| default_out(traj));
    let mut buf = Vec::new();
    write_trajectory_csv(&rec, &mut buf)?;
    write_atomic(&out_path, &buf)?;

    let mixed_path = out_path.with_file_name(format!(
        "{}_mixed.csv",
        out_path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
    ));
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["r", "beta", "p", "q", "chemin_lerner", "bochner"])?;
    for r in [Exponent::ONE, Exponent::TWO, Exponent::INFINITY] {
        let (cl, bo) = if rec.times.len() < 2 && !r.is_infinite() {
            (f64::NAN, f64::NAN)
        } else {
            (mixed_norm(&rec, r, params)?, plain_mixed_norm(&rec, r, params)?)
        };
        w.write_record([r.to_string(), fmt_f64(beta), p.to_string(), q.to_string(), fmt_f64(cl), fmt_f64(bo)])?;
    }
    write_atomic(&mixed_path, &w.into_inner()?)?;
    Ok(AnalyzeOutcome { trajectory: out_path, mixed: mixed_path, stored_drift })
}
