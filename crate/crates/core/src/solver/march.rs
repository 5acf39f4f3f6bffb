use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lp::{besov_sum, block_norms, build_partition, DyadicPartition};
use crate::record::{cumulative_trapezoid, TrajectoryRecord};
use crate::spectral::SpectralField;

use super::operators::{phi1, phi2, Operators};
use super::{ModelParams, SolverConfig};

/// How a run ended.
#[derive(Debug, Clone, PartialEq)]
pub enum RunStatus {
    Completed,
    /// Overflow or the ceiling was hit at `time`; the record stops at the last finite state.
    Blown { time: f64, reason: String },
}

impl RunStatus {
    pub fn is_blown(&self) -> bool {
        matches!(self, RunStatus::Blown { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            RunStatus::Completed => "completed",
            RunStatus::Blown { .. } => "numerical blowup",
        }
    }
}

#[derive(Debug, Clone)]
pub struct MarchOutcome {
    pub record: TrajectoryRecord,
    pub final_field: SpectralField,
    pub final_time: f64,
    pub status: RunStatus,
    /// States at the requested snapshot times that were reached.
    pub snapshots: Vec<(f64, SpectralField)>,
    pub steps: usize,
}

/// Samples collected during a run; turned into a record at the end.
pub(crate) struct Recorder<'a> {
    partition: &'a DyadicPartition,
    params: &'a ModelParams,
    times: Vec<f64>,
    blocks: Vec<Vec<f64>>,
    means: Vec<Complex64>,
}

impl<'a> Recorder<'a> {
    pub(crate) fn new(partition: &'a DyadicPartition, params: &'a ModelParams) -> Self {
        Recorder { partition, params, times: Vec::new(), blocks: Vec::new(), means: Vec::new() }
    }

    pub(crate) fn push(&mut self, t: f64, u: &SpectralField) {
        if self.times.last().is_some_and(|&s| s >= t) {
            return;
        }
        self.times.push(t);
        self.blocks.push(block_norms(u, self.params.p(), self.partition));
        self.means.push(u.mean_mode());
    }

    pub(crate) fn finish(self) -> Result<TrajectoryRecord> {
        let mut rec = TrajectoryRecord {
            times: self.times,
            j_min: self.partition.j_min(),
            p: self.params.p(),
            block_norms: self.blocks,
            fb_norms: Vec::new(),
            blowup_integral: Vec::new(),
            mean_mode: self.means,
        };
        rec.push_fb_series(self.params.data_norm())?;
        rec.push_fb_series(self.params.smoothing_norm())?;
        rec.blowup_integral = cumulative_trapezoid(&rec.times, &rec.fb_norms[1].values);
        Ok(rec)
    }
}

/// ETD coefficients `(e^z, Δφ₁(z), Δφ₂(z))` with `z = -Δ|ξ|^α`, per mode.
struct EtdCoefficients {
    dt: f64,
    decay: Vec<f64>,
    a1: Vec<f64>,
    a2: Vec<f64>,
}

impl EtdCoefficients {
    fn new(dissipation: &[f64], dt: f64) -> Self {
        let mut c = EtdCoefficients { dt, decay: Vec::new(), a1: Vec::new(), a2: Vec::new() };
        for &l in dissipation {
            let z = -dt * l;
            c.decay.push(z.exp());
            c.a1.push(dt * phi1(z));
            c.a2.push(dt * phi2(z));
        }
        c
    }
}

/// One ETD-RK2 (Cox–Matthews) step. At `ξ = 0` the decay is 1 and the forcing vanishes,
/// so the mean is carried through unchanged.
fn etd_step(ops: &Operators, coef: &EtdCoefficients, u: &SpectralField, nonlinear: bool) -> Result<SpectralField> {
    if !nonlinear {
        return Ok(u.apply_table(&coef.decay));
    }
    let nu = ops.nonlinear(u)?;
    let mut a = u.clone();
    for m in 0..a.coeffs.len() {
        a.coeffs[m] = coef.decay[m] * u.coeffs[m] + coef.a1[m] * nu.coeffs[m];
    }
    let na = ops.nonlinear(&a)?;
    for m in 0..a.coeffs.len() {
        a.coeffs[m] += coef.a2[m] * (na.coeffs[m] - nu.coeffs[m]);
    }
    Ok(a)
}

/// Exponential-integrator march of `u_t + Λ^α u = ∇·(u∇Pu)` over `[0, T]`.
pub fn time_march(u0: &SpectralField, params: &ModelParams, config: &SolverConfig) -> Result<MarchOutcome> {
    config.validate()?;
    if !u0.is_finite() {
        return Err(Error::NonFinite("initial data".into()));
    }
    let grid = u0.grid;
    let ops = Operators::new(grid, params)?;
    let partition = build_partition(&grid)?;
    let dt = config.dt.unwrap_or_else(|| SolverConfig::default_dt(&grid, params.alpha()));
    let horizon = config.horizon;
    let beta = params.beta();
    let data = params.data_norm();
    let fb_beta = |u: &SpectralField| besov_sum(&block_norms(u, data.p, &partition), partition.j_min(), beta, data.q);
    let initial = fb_beta(u0);
    let limit = if initial > 0.0 { config.ceiling * initial } else { f64::INFINITY };

    let mut stops: Vec<f64> = config.snapshots.iter().copied().filter(|&t| t > 0.0).collect();
    stops.push(horizon);
    stops.sort_by(f64::total_cmp);
    stops.dedup();

    let mut snapshots = Vec::new();
    if config.snapshots.contains(&0.0) {
        snapshots.push((0.0, u0.clone()));
    }
    let mut recorder = Recorder::new(&partition, params);
    recorder.push(0.0, u0);

    let full = EtdCoefficients::new(&ops.dissipation, dt);
    let mut partial: Option<EtdCoefficients> = None;
    let mut u = u0.clone();
    let mut t = 0.0;
    let mut steps = 0usize;
    let mut status = RunStatus::Completed;

    'outer: for &stop in &stops {
        while t < stop {
            let remaining = stop - t;
            let (h, land) = if remaining <= dt * (1.0 + 1e-9) { (remaining, true) } else { (dt, false) };
            let coef = if (h - dt).abs() <= 1e-15 * dt {
                &full
            } else {
                if partial.as_ref().is_none_or(|c| c.dt != h) {
                    partial = Some(EtdCoefficients::new(&ops.dissipation, h));
                }
                partial.as_ref().expect("just built")
            };
            let next = match etd_step(&ops, coef, &u, config.nonlinear) {
                Ok(v) if v.is_finite() => v,
                Ok(_) | Err(Error::NonFinite(_)) => {
                    status = RunStatus::Blown { time: t + h, reason: "non-finite values".into() };
                    break 'outer;
                }
                Err(e) => return Err(e),
            };
            u = next;
            t = if land { stop } else { t + h };
            steps += 1;
            let level = fb_beta(&u);
            if steps.is_multiple_of(config.record_every) || land {
                recorder.push(t, &u);
            }
            if !level.is_finite() || level > limit {
                recorder.push(t, &u);
                status = RunStatus::Blown {
                    time: t,
                    reason: format!("FB^beta norm {level:.3e} exceeded ceiling {limit:.3e}"),
                };
                break 'outer;
            }
        }
        if config.snapshots.contains(&stop) {
            snapshots.push((stop, u.clone()));
        }
    }
    if let RunStatus::Blown { time, reason } = &status {
        log::warn!("run stopped at t = {time}: {reason}");
    }
    Ok(MarchOutcome { record: recorder.finish()?, final_field: u, final_time: t, status, snapshots, steps })
}
