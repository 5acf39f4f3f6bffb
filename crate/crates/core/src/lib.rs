//! Pseudo-spectral toolkit for `u_t + Λ^α u = ∇·(u∇Pu)` on periodic boxes, with
//! Littlewood–Paley blocks, Fourier–Besov norms, mild-solution iteration and
//! numerical checks of the associated inequalities.

pub mod error;
pub mod estimates;
pub mod exponent;
mod fft;
pub mod grid;
pub mod io;
pub mod lp;
pub mod pressure;
pub mod record;
pub mod solver;
pub mod spectral;
pub mod testfields;
pub mod wellposedness;

pub use error::{Error, Result};
pub use exponent::Exponent;
pub use grid::GridSpec;
pub use lp::{build_partition, fb_norm, DyadicPartition, FBNormParams};
pub use pressure::{PressureKind, PressureSpec, SymbolTable};
pub use record::{FieldTrajectory, TrajectoryRecord};
pub use solver::{ModelParams, SolverConfig};
pub use spectral::{RealField, SpectralField};
