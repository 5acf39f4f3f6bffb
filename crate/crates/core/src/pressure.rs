//! Pressure operators `P` as real Fourier multipliers, their gradient action
//! `∇Pu`, and an empirical fit of the block-order exponent σ.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::grid::GridSpec;
use crate::lp::DyadicPartition;
use crate::spectral::{partial_derivative, SpectralField};

/// Tabulated symbol `m(ξ)` on one grid, for experimentation.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolTable {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PressureKind {
    /// `P = Λ^{-2s}`, `0 < s ≤ 1`.
    Riesz { s: f64 },
    /// `P u = ±e^{-|x|} ∗ u`; `attractive` selects the aggregation sign `-e^{-|x|}`.
    ExpKernel { attractive: bool },
    Identity,
    Custom(SymbolTable),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PressureSpec {
    kind: PressureKind,
    sigma: f64,
}

impl PressureSpec {
    pub fn riesz(s: f64) -> Result<Self> {
        if !(s > 0.0 && s <= 1.0) {
            return Err(Error::Parameter(format!("Riesz order s must lie in (0, 1], got {s}")));
        }
        Ok(PressureSpec { kind: PressureKind::Riesz { s }, sigma: 1.0 - 2.0 * s })
    }

    pub fn exp_kernel() -> Self {
        PressureSpec { kind: PressureKind::ExpKernel { attractive: false }, sigma: 0.0 }
    }

    pub fn exp_kernel_attractive() -> Self {
        PressureSpec { kind: PressureKind::ExpKernel { attractive: true }, sigma: 0.0 }
    }

    pub fn identity() -> Self {
        PressureSpec { kind: PressureKind::Identity, sigma: 1.0 }
    }

    /// A tabulated symbol with a caller-declared order σ.
    pub fn custom(table: SymbolTable, sigma: f64) -> Result<Self> {
        if table.values.len() != table.grid.len() {
            return Err(Error::Parameter("symbol table size does not match its grid".into()));
        }
        if let Some(v) = table.values.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("custom symbol value {v}")));
        }
        if !sigma.is_finite() {
            return Err(Error::Parameter("custom sigma must be finite".into()));
        }
        Ok(PressureSpec { kind: PressureKind::Custom(table), sigma })
    }

    pub fn kind(&self) -> &PressureKind {
        &self.kind
    }

    /// Order σ in `‖Δ_k ∇Pu‖ ≤ C 2^{kσ} ‖Δ_k u‖`.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            PressureKind::Riesz { .. } => "riesz",
            PressureKind::ExpKernel { .. } => "exp_kernel",
            PressureKind::Identity => "identity",
            PressureKind::Custom(_) => "custom",
        }
    }
}

/// `∫_{R^n} e^{-|x|} dx` for n = 1, 2, 3.
pub fn exp_kernel_mass(dim: usize) -> f64 {
    match dim {
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 8.0 * PI,
    }
}

/// `m(ξ)` on every lattice point.
pub fn pressure_symbol(spec: &PressureSpec, grid: &GridSpec) -> Result<Vec<f64>> {
    let norms = grid.xi_norms();
    Ok(match &spec.kind {
        PressureKind::Riesz { s } => norms
            .iter()
            .map(|&r| if r == 0.0 { 0.0 } else { r.powf(-2.0 * s) })
            .collect(),
        PressureKind::Identity => vec![1.0; grid.len()],
        PressureKind::ExpKernel { attractive } => {
            let c = exp_kernel_mass(grid.dim()) * if *attractive { -1.0 } else { 1.0 };
            let e = -(grid.dim() as f64 + 1.0) / 2.0;
            norms.iter().map(|&r| c * (1.0 + r * r).powf(e)).collect()
        }
        PressureKind::Custom(table) => {
            if table.grid != *grid {
                return Err(Error::GridMismatch);
            }
            table.values.clone()
        }
    })
}

/// `∇Pu` with a precomputed symbol.
pub fn pressure_gradient_with(u: &SpectralField, symbol: &[f64]) -> Vec<SpectralField> {
    let pu = u.apply_table(symbol);
    (0..u.grid.dim()).map(|axis| partial_derivative(&pu, axis)).collect()
}

/// `∇Pu`: component `i` is `i ξ_i m(ξ) û(ξ)` (Nyquist rows zeroed as in `gradient`).
pub fn pressure_gradient(u: &SpectralField, spec: &PressureSpec) -> Result<Vec<SpectralField>> {
    let symbol = pressure_symbol(spec, &u.grid)?;
    Ok(pressure_gradient_with(u, &symbol))
}

/// Per-block ratios and least-squares slopes of `log₂(‖Δ_k∇Pu‖/‖Δ_k u‖)` against `k`.
#[derive(Debug, Clone)]
pub struct SigmaEstimate {
    /// Slope over the upper half of the resolved blocks.
    pub slope: f64,
    /// Slope over the lower half of the resolved blocks.
    pub low_slope: f64,
    /// `(k, ratio_k)` for every usable block.
    pub ratios: Vec<(i32, f64)>,
}

impl SigmaEstimate {
    /// Smallest `C` with `ratio_k ≤ C·2^{kσ}` on every probed block.
    pub fn bound_constant(&self, sigma: f64) -> f64 {
        self.ratios
            .iter()
            .map(|&(k, r)| r / 2f64.powf(k as f64 * sigma))
            .fold(0.0, f64::max)
    }
}

fn ls_slope(points: &[(i32, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::DegenerateFit(format!("{} usable blocks, need 2", points.len())));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0 as f64).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1.log2()).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 as f64 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 as f64 - mx) * (p.1.log2() - my)).sum();
    Ok(sxy / sxx)
}

/// Probe each resolved block with the unit-`L^p` bump `φ_k` and fit the growth
/// rate of the pressure-gradient ratio.
pub fn estimate_sigma(
    spec: &PressureSpec,
    grid: &GridSpec,
    partition: &DyadicPartition,
    p: Exponent,
) -> Result<SigmaEstimate> {
    if partition.grid() != grid {
        return Err(Error::GridMismatch);
    }
    if partition.block_count() < 4 {
        return Err(Error::Config(format!(
            "sigma estimate needs at least 4 resolved blocks, grid has {}",
            partition.block_count()
        )));
    }
    let symbol = pressure_symbol(spec, grid)?;
    let cell = grid.cell();
    let lp = |vals: &mut dyn Iterator<Item = f64>| p.weighted_norm(vals.map(|v| (cell, v)));
    let mut ratios = Vec::new();
    for k in partition.j_range() {
        let mask = partition.mask(k).expect("resolved block");
        let scale = lp(&mut mask.iter().copied());
        if scale == 0.0 {
            continue;
        }
        let probe = SpectralField::new(*grid, mask.iter().map(|&m| (m / scale).into()).collect())?;
        let grad = pressure_gradient_with(&probe, &symbol);
        let num = lp(&mut (0..grid.len()).map(|f| {
            let mag = grad.iter().map(|c| c.coeffs[f].norm_sqr()).sum::<f64>().sqrt();
            mask[f] * mag
        }));
        let den = lp(&mut (0..grid.len()).map(|f| mask[f] * probe.coeffs[f].norm()));
        let ratio = num / den;
        if ratio.is_finite() && ratio > 0.0 {
            ratios.push((k, ratio));
        }
    }
    let half = ratios.len().div_ceil(2);
    let slope = ls_slope(&ratios[ratios.len() - half..])?;
    let low_slope = ls_slope(&ratios[..half])?;
    Ok(SigmaEstimate { slope, low_slope, ratios })
}
