//! Mild-solution machinery for `u_t + Λ^α u = ∇·(u ∇Pu)` (unit viscosity).

mod duhamel;
mod march;
mod operators;
mod picard;

pub use duhamel::{duhamel, duhamel_forcing, DuhamelRule};
pub use march::{time_march, MarchOutcome, RunStatus};
pub use operators::{nonlinear_term, phi1, phi2, semigroup_apply, Operators};
pub use picard::{picard_solve, PicardOutcome, PicardStatus};

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::lp::FBNormParams;
use crate::pressure::PressureSpec;

/// Dissipation order, pressure operator and the indices used for norm tracking.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    alpha: f64,
    pressure: PressureSpec,
    dim: usize,
    p: Exponent,
    q: Exponent,
}

impl ModelParams {
    pub fn new(alpha: f64, pressure: PressureSpec, dim: usize, p: Exponent, q: Exponent) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::Parameter(format!("alpha must be positive, got {alpha}")));
        }
        if !(1..=3).contains(&dim) {
            return Err(Error::Parameter(format!("dimension must be 1, 2 or 3, got {dim}")));
        }
        Ok(ModelParams { alpha, pressure, dim, p, q })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn pressure(&self) -> &PressureSpec {
        &self.pressure
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn p(&self) -> Exponent {
        self.p
    }

    pub fn q(&self) -> Exponent {
        self.q
    }

    pub fn sigma(&self) -> f64 {
        self.pressure.sigma()
    }

    /// Critical index `n(1 − 1/p) − α + σ + 1`.
    pub fn beta(&self) -> f64 {
        crate::wellposedness::critical_index(self.dim, self.p, self.alpha, self.sigma())
    }

    /// `FB^β_{p,q}` (the data space).
    pub fn data_norm(&self) -> FBNormParams {
        FBNormParams::new(self.beta(), self.p, self.q)
    }

    /// `FB^{β+α}_{p,q}` (the smoothing target of the blowup integral).
    pub fn smoothing_norm(&self) -> FBNormParams {
        FBNormParams::new(self.beta() + self.alpha, self.p, self.q)
    }

    /// Index `β + α/r` of the Picard working space `L̃^r_T(FB^{β+α/r}_{p,q})`.
    pub fn working_norm(&self, r: Exponent) -> FBNormParams {
        FBNormParams::new(self.beta() + self.alpha * r.recip(), self.p, self.q)
    }
}

/// Time-stepping, recording and fixed-point controls.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub horizon: f64,
    /// Base step; `None` selects `0.25·(dxi·N/3)^{-α}`.
    pub dt: Option<f64>,
    pub record_every: usize,
    pub picard_max_iter: usize,
    pub picard_tol: f64,
    /// Uniform Duhamel nodes per horizon for the Picard path.
    pub picard_nodes: usize,
    pub duhamel_rule: DuhamelRule,
    /// Time exponent `r` of the Picard working space.
    pub working_exponent: Exponent,
    /// Include `∇·(u∇Pu)`; off gives the pure fractional heat flow.
    pub nonlinear: bool,
    /// Blowup flag once `‖u‖_{FB^β}` exceeds this multiple of its initial value.
    pub ceiling: f64,
    /// Times at which the marcher lands exactly and keeps a copy of the state.
    pub snapshots: Vec<f64>,
}

impl SolverConfig {
    pub fn new(horizon: f64) -> Self {
        SolverConfig {
            horizon,
            dt: None,
            record_every: 1,
            picard_max_iter: 50,
            picard_tol: 1e-10,
            picard_nodes: 64,
            duhamel_rule: DuhamelRule::Exponential,
            working_exponent: Exponent::TWO,
            nonlinear: true,
            ceiling: 1e8,
            snapshots: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(Error::Config(format!("horizon T must be positive, got {}", self.horizon)));
        }
        if let Some(dt) = self.dt {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(Error::Config(format!("dt must be positive, got {dt}")));
            }
        }
        if !(self.picard_tol > 0.0) {
            return Err(Error::Config("picard tolerance must be positive".into()));
        }
        if self.record_every == 0 || self.picard_nodes == 0 || self.picard_max_iter == 0 {
            return Err(Error::Config("record_every, picard nodes and max_iter must be >= 1".into()));
        }
        if !(self.ceiling > 1.0) {
            return Err(Error::Config("blowup ceiling must exceed 1".into()));
        }
        if self.snapshots.iter().any(|&t| !(0.0..=self.horizon).contains(&t)) {
            return Err(Error::Config("snapshot times must lie in [0, T]".into()));
        }
        Ok(())
    }

    pub fn default_dt(grid: &crate::grid::GridSpec, alpha: f64) -> f64 {
        0.25 * (grid.dxi() * grid.points() as f64 / 3.0).powf(-alpha)
    }
}
