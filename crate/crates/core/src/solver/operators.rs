use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::pressure::pressure_symbol;
use crate::spectral::{dealias_mask, divergence, from_physical, partial_derivative, to_physical, SpectralField};

use super::ModelParams;

/// Precomputed multiplier tables for one grid and one model.
#[derive(Debug, Clone)]
pub struct Operators {
    pub grid: GridSpec,
    pub params: ModelParams,
    /// `|ξ|^α`.
    pub dissipation: Vec<f64>,
    /// Pressure symbol `m(ξ)`.
    pub symbol: Vec<f64>,
    pub dealias: Vec<f64>,
}

impl Operators {
    pub fn new(grid: GridSpec, params: &ModelParams) -> Result<Self> {
        if grid.dim() != params.dim() {
            return Err(Error::Parameter(format!(
                "grid dimension {} does not match model dimension {}",
                grid.dim(),
                params.dim()
            )));
        }
        let alpha = params.alpha();
        let dissipation = grid
            .xi_norms()
            .into_iter()
            .map(|r| if r == 0.0 { 0.0 } else { r.powf(alpha) })
            .collect();
        Ok(Operators {
            grid,
            params: params.clone(),
            dissipation,
            symbol: pressure_symbol(params.pressure(), &grid)?,
            dealias: dealias_mask(&grid),
        })
    }

    /// `e^{-tΛ^α} u`.
    pub fn semigroup(&self, u: &SpectralField, t: f64) -> SpectralField {
        let coeffs = u
            .coeffs
            .iter()
            .zip(&self.dissipation)
            .map(|(c, l)| c * (-t * l).exp())
            .collect();
        SpectralField { grid: u.grid, coeffs }
    }

    /// `dealias(∇·(u ∇Pv))`, pseudo-spectrally.
    pub fn bilinear(&self, u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
        u.ensure_same_grid(v)?;
        let phys_u = to_physical(u);
        self.bilinear_phys(&phys_u, v)
    }

    pub fn nonlinear(&self, u: &SpectralField) -> Result<SpectralField> {
        self.bilinear(u, u)
    }

    fn bilinear_phys(&self, phys_u: &[Complex64], v: &SpectralField) -> Result<SpectralField> {
        let pv = v.apply_table(&self.symbol);
        let fluxes: Vec<SpectralField> = (0..self.grid.dim())
            .map(|axis| {
                let g = to_physical(&partial_derivative(&pv, axis));
                let prod = phys_u.iter().zip(&g).map(|(a, b)| a * b).collect();
                from_physical(self.grid, prod).apply_table(&self.dealias)
            })
            .collect();
        let out = divergence(&fluxes)?;
        if !out.is_finite() {
            return Err(Error::NonFinite("nonlinear term overflowed".into()));
        }
        Ok(out)
    }
}

/// `e^{-tΛ^α} u`; `t = 0` is the identity.
pub fn semigroup_apply(u: &SpectralField, t: f64, alpha: f64) -> Result<SpectralField> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Parameter(format!("semigroup time must be >= 0, got {t}")));
    }
    if !(alpha > 0.0) {
        return Err(Error::Parameter(format!("alpha must be positive, got {alpha}")));
    }
    if t == 0.0 {
        return Ok(u.clone());
    }
    let norms = u.grid.xi_norms();
    Ok(u.map_multiplier(|f| if norms[f] == 0.0 { 1.0 } else { (-t * norms[f].powf(alpha)).exp() }))
}

/// `dealias(∇·(u ∇Pu))`.
pub fn nonlinear_term(u: &SpectralField, params: &ModelParams) -> Result<SpectralField> {
    Operators::new(u.grid, params)?.nonlinear(u)
}

/// `φ₁(z) = (e^z − 1)/z`.
pub fn phi1(z: f64) -> f64 {
    if z.abs() < 1e-5 {
        1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0
    } else {
        z.exp_m1() / z
    }
}

/// `φ₂(z) = (e^z − 1 − z)/z²`.
pub fn phi2(z: f64) -> f64 {
    if z.abs() < 1e-2 {
        let mut term = 0.5;
        let mut sum = 0.5;
        for k in 3..10 {
            term *= z / k as f64;
            sum += term;
        }
        sum
    } else {
        (z.exp_m1() - z) / (z * z)
    }
}
