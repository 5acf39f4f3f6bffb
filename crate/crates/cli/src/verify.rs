use std::io::Write;

use anyhow::{bail, Result};
use clap::ValueEnum;

use fbpme::estimates::{apriori_batch, bilinear_batch, duhamel_batch, interpolation_batch, BatchReport};
use fbpme::{Exponent, GridSpec, ModelParams, PressureSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Apriori,
    Interpolation,
    Bilinear,
    Duhamel,
    All,
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub dim: usize,
    pub points: usize,
    pub alpha: f64,
    pub riesz_s: f64,
    pub cases: usize,
    pub seed: u64,
}

/// One table row. A suite passes when a held-out batch stays under the constant fitted
/// on a training batch; interpolation is an exact Hölder bound, so its constant is 1.
#[derive(Debug, Clone)]
pub struct Row {
    pub suite: &'static str,
    pub cases: usize,
    pub train_max: f64,
    pub constant: f64,
    pub heldout_max: f64,
    pub pass: bool,
}

fn finite_max(b: &BatchReport) -> Result<f64> {
    if b.ratios.iter().any(|r| !r.is_finite()) {
        bail!("{} batch produced a non-finite ratio", b.name);
    }
    Ok(b.max())
}

fn fitted_row(suite: &'static str, cases: usize, batch: impl Fn(u64) -> Result<BatchReport>, seed: u64) -> Result<Row> {
    let train = finite_max(&batch(seed)?)?;
    let held = finite_max(&batch(seed.wrapping_add(1_000_003))?)?;
    let constant = 1.5 * train;
    Ok(Row { suite, cases, train_max: train, constant, heldout_max: held, pass: held <= constant })
}

pub fn run_suites(suite: Suite, opts: &VerifyOptions) -> Result<Vec<Row>> {
    let grid = GridSpec::new(opts.dim, opts.points, 4.0 * std::f64::consts::PI / 3.0)?;
    let params = ModelParams::new(opts.alpha, PressureSpec::riesz(opts.riesz_s)?, opts.dim, Exponent::TWO, Exponent::TWO)?;
    let n = opts.cases;
    let mut rows = Vec::new();
    let want = |s: Suite| suite == Suite::All || suite == s;
    if want(Suite::Apriori) {
        rows.push(fitted_row("apriori", n, |s| Ok(apriori_batch(grid, &params, 1.0, n, s)?), opts.seed)?);
    }
    if want(Suite::Interpolation) {
        let mut worst = 0.0f64;
        let triples = [(0.5, Exponent::ONE, Exponent::INFINITY), (0.25, Exponent::TWO, Exponent::ONE), (0.75, Exponent::INFINITY, Exponent::TWO)];
        for (k, &(theta, r1, r2)) in triples.iter().enumerate() {
            let b = interpolation_batch(grid, theta, r1, r2, params.data_norm(), opts.alpha, n, opts.seed.wrapping_add(k as u64 * 7919))?;
            worst = worst.max(finite_max(&b)?);
        }
        // small slack for quadrature rounding
        let constant = 1.0 + 1e-8;
        rows.push(Row { suite: "interpolation", cases: 3 * n, train_max: worst, constant, heldout_max: worst, pass: worst <= constant });
    }
    if want(Suite::Bilinear) {
        rows.push(fitted_row("bilinear", n, |s| Ok(bilinear_batch(grid, grid, &params, n, s)?), opts.seed)?);
    }
    if want(Suite::Duhamel) {
        rows.push(fitted_row("duhamel", n, |s| Ok(duhamel_batch(grid, &params, 1.0, Exponent::TWO, n, s)?), opts.seed)?);
    }
    Ok(rows)
}

pub fn write_table(rows: &[Row], w: impl Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["suite", "cases", "train_max", "constant", "heldout_max", "status"])?;
    for r in rows {
        out.write_record([
            r.suite.to_string(),
            r.cases.to_string(),
            fbpme::io::fmt_f64(r.train_max),
            fbpme::io::fmt_f64(r.constant),
            fbpme::io::fmt_f64(r.heldout_max),
            if r.pass { "PASS" } else { "FAIL" }.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}
