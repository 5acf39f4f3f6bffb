use crate::error::{Error, Result};
use crate::lp::{build_partition, DyadicPartition};
use crate::record::{mixed_norm, FieldTrajectory, TrajectoryRecord};
use crate::spectral::SpectralField;

use super::duhamel::duhamel_forcing;
use super::march::Recorder;
use super::operators::Operators;
use super::{ModelParams, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PicardStatus {
    Converged,
    MaxIterations,
    /// Three consecutive increment ratios at or above one.
    Diverged,
    NonFinite,
}

#[derive(Debug, Clone)]
pub struct PicardOutcome {
    pub status: PicardStatus,
    pub iterations: usize,
    /// `‖u^{(m+1)} − u^{(m)}‖_X / ‖u^{(m)} − u^{(m−1)}‖_X`.
    pub ratios: Vec<f64>,
    /// `‖u^{(m+1)} − u^{(m)}‖_X` per iteration.
    pub increments: Vec<f64>,
    /// `‖u‖_X` of the last iterate.
    pub x_norm: f64,
    /// `‖S(t)u0‖_X`.
    pub linear_x_norm: f64,
    pub trajectory: FieldTrajectory,
    pub record: TrajectoryRecord,
}

impl PicardOutcome {
    pub fn final_field(&self) -> &SpectralField {
        self.trajectory.last()
    }
}

fn x_norm(traj: &FieldTrajectory, params: &ModelParams, config: &SolverConfig, partition: &DyadicPartition) -> Result<f64> {
    let rec = traj.record(params.p(), partition);
    mixed_norm(&rec, config.working_exponent, params.working_norm(config.working_exponent))
}

/// Fixed-point iteration `u ← S(t)u0 + H(u,u)` on `picard_nodes` uniform nodes of `[0, T]`.
pub fn picard_solve(u0: &SpectralField, params: &ModelParams, config: &SolverConfig) -> Result<PicardOutcome> {
    config.validate()?;
    if !u0.is_finite() {
        return Err(Error::NonFinite("initial data".into()));
    }
    let grid = u0.grid;
    let ops = Operators::new(grid, params)?;
    let partition = build_partition(&grid)?;
    let linear = FieldTrajectory::uniform(config.horizon, config.picard_nodes, |t| ops.semigroup(u0, t))?;
    let linear_x_norm = x_norm(&linear, params, config, &partition)?;

    let mut current = linear.clone();
    let mut ratios = Vec::new();
    let mut increments = Vec::new();
    let mut status = PicardStatus::MaxIterations;
    let mut iterations = 0;
    let mut streak = 0;
    let mut x = linear_x_norm;
    if !config.nonlinear {
        // the linear flow is the first iterate
        status = PicardStatus::Converged;
    }

    while config.nonlinear && iterations < config.picard_max_iter {
        let forcing = current.fields.iter().map(|u| ops.nonlinear(u)).collect::<Result<Vec<_>>>();
        let forcing = match forcing {
            Ok(f) => f,
            Err(Error::NonFinite(_)) => {
                status = PicardStatus::NonFinite;
                break;
            }
            Err(e) => return Err(e),
        };
        let h = duhamel_forcing(&FieldTrajectory::new(current.times.clone(), forcing)?, params.alpha(), config.duhamel_rule)?;
        let fields: Vec<SpectralField> = linear.fields.iter().zip(&h).map(|(s, h)| s.add(h)).collect();
        if fields.iter().any(|f| !f.is_finite()) {
            status = PicardStatus::NonFinite;
            break;
        }
        let next = FieldTrajectory::new(current.times.clone(), fields)?;
        let diff = FieldTrajectory::new(
            current.times.clone(),
            next.fields.iter().zip(&current.fields).map(|(a, b)| a.sub(b)).collect(),
        )?;
        let inc = x_norm(&diff, params, config, &partition)?;
        x = x_norm(&next, params, config, &partition)?;
        iterations += 1;
        if let Some(&prev) = increments.last() {
            let ratio: f64 = inc / prev;
            ratios.push(ratio);
            streak = if ratio >= 1.0 { streak + 1 } else { 0 };
        }
        increments.push(inc);
        current = next;
        if inc <= config.picard_tol * x || (inc == 0.0 && x == 0.0) {
            status = PicardStatus::Converged;
            break;
        }
        if streak >= 3 {
            status = PicardStatus::Diverged;
            break;
        }
    }
    log::debug!("picard: {status:?} after {iterations} iterations, ratios {ratios:?}");

    let mut recorder = Recorder::new(&partition, params);
    for (t, u) in current.times.iter().zip(&current.fields) {
        recorder.push(*t, u);
    }
    Ok(PicardOutcome {
        status,
        iterations,
        ratios,
        increments,
        x_norm: x,
        linear_x_norm,
        record: recorder.finish()?,
        trajectory: current,
    })
}
