//! Time series of block norms and the mixed time–space norms built from them.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::lp::{besov_sum, block_norms, DyadicPartition, FBNormParams};
use crate::spectral::SpectralField;

/// Spectral fields sampled at increasing times.
#[derive(Debug, Clone)]
pub struct FieldTrajectory {
    pub times: Vec<f64>,
    pub fields: Vec<SpectralField>,
}

impl FieldTrajectory {
    pub fn new(times: Vec<f64>, fields: Vec<SpectralField>) -> Result<Self> {
        if times.len() != fields.len() || times.is_empty() {
            return Err(Error::Parameter("trajectory needs matching, non-empty times and fields".into()));
        }
        check_increasing(&times)?;
        if fields.windows(2).any(|w| w[0].grid != w[1].grid) {
            return Err(Error::GridMismatch);
        }
        Ok(FieldTrajectory { times, fields })
    }

    /// `n + 1` uniform nodes on `[0, horizon]` with the field produced by `f(t)`.
    pub fn uniform(horizon: f64, intervals: usize, f: impl Fn(f64) -> SpectralField) -> Result<Self> {
        if intervals == 0 || !(horizon > 0.0) {
            return Err(Error::Parameter("uniform trajectory needs horizon > 0 and >= 1 interval".into()));
        }
        let times: Vec<f64> = (0..=intervals).map(|i| horizon * i as f64 / intervals as f64).collect();
        let fields = times.iter().map(|&t| f(t)).collect();
        FieldTrajectory::new(times, fields)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> &SpectralField {
        self.fields.last().expect("non-empty trajectory")
    }

    /// Block norms at every node.
    pub fn block_norms(&self, p: Exponent, partition: &DyadicPartition) -> Vec<Vec<f64>> {
        self.fields.iter().map(|u| block_norms(u, p, partition)).collect()
    }

    pub fn record(&self, p: Exponent, partition: &DyadicPartition) -> TrajectoryRecord {
        TrajectoryRecord {
            times: self.times.clone(),
            j_min: partition.j_min(),
            p,
            block_norms: self.block_norms(p, partition),
            fb_norms: Vec::new(),
            blowup_integral: Vec::new(),
            mean_mode: self.fields.iter().map(|u| u.mean_mode()).collect(),
        }
    }
}

fn check_increasing(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Parameter("times must be finite and strictly increasing".into()));
    }
    Ok(())
}

/// One derived Fourier–Besov series stored alongside the block norms.
#[derive(Debug, Clone, PartialEq)]
pub struct FbSeries {
    pub params: FBNormParams,
    pub values: Vec<f64>,
}

/// Block norms `‖φ_j û(t)‖_{L^p}` per sample time, plus derived series.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub j_min: i32,
    /// Lebesgue exponent the block norms were taken in.
    pub p: Exponent,
    /// `block_norms[t][j - j_min]`.
    pub block_norms: Vec<Vec<f64>>,
    pub fb_norms: Vec<FbSeries>,
    /// Running `∫_0^t ‖u‖_{FB^{β+α}} dτ` (trapezoidal over the samples).
    pub blowup_integral: Vec<f64>,
    pub mean_mode: Vec<Complex64>,
}

impl TrajectoryRecord {
    pub fn validate(&self) -> Result<()> {
        check_increasing(&self.times)?;
        let nt = self.times.len();
        if self.block_norms.len() != nt {
            return Err(Error::Format("block norm rows do not match time samples".into()));
        }
        if let Some(first) = self.block_norms.first() {
            if self.block_norms.iter().any(|r| r.len() != first.len()) {
                return Err(Error::Format("ragged block norm rows".into()));
            }
        }
        for s in &self.fb_norms {
            if s.values.len() != nt {
                return Err(Error::Format("fb norm series length mismatch".into()));
            }
        }
        Ok(())
    }

    pub fn block_count(&self) -> usize {
        self.block_norms.first().map_or(0, |r| r.len())
    }

    /// `FB^β_{p,q}` norm at each sample.
    pub fn fb_series(&self, params: FBNormParams) -> Result<Vec<f64>> {
        self.require_p(params.p)?;
        Ok(self
            .block_norms
            .iter()
            .map(|b| besov_sum(b, self.j_min, params.beta, params.q))
            .collect())
    }

    pub fn push_fb_series(&mut self, params: FBNormParams) -> Result<()> {
        let values = self.fb_series(params)?;
        self.fb_norms.push(FbSeries { params, values });
        Ok(())
    }

    fn require_p(&self, p: Exponent) -> Result<()> {
        if p != self.p {
            return Err(Error::Parameter(format!(
                "record holds block norms in L^{}, requested L^{}",
                self.p, p
            )));
        }
        Ok(())
    }

    /// Restrict to samples `range`.
    pub fn slice(&self, range: std::ops::Range<usize>) -> TrajectoryRecord {
        TrajectoryRecord {
            times: self.times[range.clone()].to_vec(),
            j_min: self.j_min,
            p: self.p,
            block_norms: self.block_norms[range.clone()].to_vec(),
            fb_norms: self
                .fb_norms
                .iter()
                .map(|s| FbSeries { params: s.params, values: s.values[range.clone()].to_vec() })
                .collect(),
            blowup_integral: self.blowup_integral.get(range.clone()).map(|s| s.to_vec()).unwrap_or_default(),
            mean_mode: self.mean_mode.get(range).map(|s| s.to_vec()).unwrap_or_default(),
        }
    }
}

/// Trapezoidal weights for samples at `times`.
pub fn trapezoid_weights(times: &[f64]) -> Vec<f64> {
    let n = times.len();
    let mut w = vec![0.0; n];
    for i in 0..n.saturating_sub(1) {
        let h = times[i + 1] - times[i];
        w[i] += 0.5 * h;
        w[i + 1] += 0.5 * h;
    }
    w
}

/// Running trapezoidal integral of `values` over `times`, starting at 0.
pub fn cumulative_trapezoid(times: &[f64], values: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    for i in 0..values.len() {
        if i > 0 {
            acc += 0.5 * (times[i] - times[i - 1]) * (values[i] + values[i - 1]);
        }
        out.push(acc);
    }
    out
}

/// `L^r` norm in time of a sampled non-negative series.
pub fn time_norm(times: &[f64], values: &[f64], r: Exponent) -> Result<f64> {
    if times.is_empty() {
        return Err(Error::Quadrature("empty time series".into()));
    }
    if r.is_infinite() {
        return Ok(values.iter().fold(0.0, |m, v| m.max(v.abs())));
    }
    if times.len() < 2 {
        return Err(Error::Quadrature(format!(
            "a single time sample cannot carry an L^{r} quadrature"
        )));
    }
    let w = trapezoid_weights(times);
    Ok(r.weighted_norm(w.into_iter().zip(values.iter().copied())))
}

/// Chemin–Lerner norm `‖2^{jβ} ‖φ_j û‖_{L^r_t L^p}‖_{ℓ^q}`.
pub fn mixed_norm(rec: &TrajectoryRecord, r: Exponent, params: FBNormParams) -> Result<f64> {
    rec.require_p(params.p)?;
    let nb = rec.block_count();
    let mut per_block = Vec::with_capacity(nb);
    let mut column = vec![0.0; rec.times.len()];
    for j in 0..nb {
        for (c, row) in column.iter_mut().zip(&rec.block_norms) {
            *c = row[j];
        }
        per_block.push(time_norm(&rec.times, &column, r)?);
    }
    Ok(besov_sum(&per_block, rec.j_min, params.beta, params.q))
}

/// Plain Bochner norm `‖ ‖u(t)‖_{FB^β_{p,q}} ‖_{L^r_t}`.
pub fn plain_mixed_norm(rec: &TrajectoryRecord, r: Exponent, params: FBNormParams) -> Result<f64> {
    let series = rec.fb_series(params)?;
    time_norm(&rec.times, &series, r)
}
