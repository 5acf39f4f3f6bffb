//! Real fields on the torus, their Fourier coefficients, and the multiplier algebra
//! (fractional Laplacian, gradient, divergence, 2/3-rule dealiasing).
//!
//! Coefficients approximate the continuous transform `û(ξ) = ∫ u(x) e^{-iξ·x} dx`
//! by a Riemann sum, i.e. the DFT scaled by `(2L/N)^n` with the phase shift that
//! places the origin at `x = 0`. With this normalization
//! `‖u‖²_{L²} = (2L)^{-n} Σ |û|²` and a constant `c` has zero mode `c·(2L)^n`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;
use crate::grid::GridSpec;

/// Relative tolerance for the Hermitian-symmetry check in [`inverse_transform`].
pub const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

impl RealField {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Parameter(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("sample value {v}")));
        }
        Ok(RealField { grid, values })
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn([f64; 3]) -> f64) -> Result<Self> {
        let values = (0..grid.len()).map(|i| f(grid.x(i))).collect();
        RealField::new(grid, values)
    }

    /// `(Σ |u|² h^n)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        let h = self.grid.dx().powi(self.grid.dim() as i32);
        (self.values.iter().map(|v| v * v).sum::<f64>() * h).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    pub grid: GridSpec,
    pub coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: GridSpec) -> Self {
        SpectralField { grid, coeffs: vec![Complex64::default(); grid.len()] }
    }

    pub fn new(grid: GridSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::Parameter(format!(
                "expected {} coefficients, got {}",
                grid.len(),
                coeffs.len()
            )));
        }
        Ok(SpectralField { grid, coeffs })
    }

    /// Build coefficients from a function of the physical wavevector.
    pub fn from_symbol(grid: GridSpec, f: impl Fn([f64; 3]) -> Complex64) -> Self {
        let coeffs = (0..grid.len()).map(|i| f(grid.xi(i))).collect();
        SpectralField { grid, coeffs }
    }

    /// Zero-frequency coefficient `û(0)`.
    pub fn mean_mode(&self) -> Complex64 {
        self.coeffs[0]
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn ensure_same_grid(&self, other: &SpectralField) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// Pointwise multiplication by a real symbol given per lattice offset.
    pub fn map_multiplier(&self, m: impl Fn(usize) -> f64) -> SpectralField {
        let coeffs = self.coeffs.iter().enumerate().map(|(f, c)| c * m(f)).collect();
        SpectralField { grid: self.grid, coeffs }
    }

    /// Pointwise multiplication by a precomputed real symbol table.
    pub fn apply_table(&self, table: &[f64]) -> SpectralField {
        debug_assert_eq!(table.len(), self.coeffs.len());
        let coeffs = self.coeffs.iter().zip(table).map(|(c, m)| c * m).collect();
        SpectralField { grid: self.grid, coeffs }
    }

    pub fn scaled(&self, s: f64) -> SpectralField {
        self.map_multiplier(|_| s)
    }

    /// `self += a·other`.
    pub fn axpy(&mut self, a: f64, other: &SpectralField) {
        for (x, y) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *x += y * a;
        }
    }

    pub fn add(&self, other: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.axpy(1.0, other);
        out
    }

    pub fn sub(&self, other: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    /// `(Σ |û|²)^{1/2}`, the plain ℓ² size of the coefficient array.
    pub fn coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |û|`.
    pub fn coeff_max(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    /// `‖u‖_{L²}` via Parseval.
    pub fn l2_norm(&self) -> f64 {
        self.coeff_norm() / self.grid.volume().sqrt()
    }

    /// Largest `|û(-ξ) - conj(û(ξ))|`.
    pub fn hermitian_defect(&self) -> f64 {
        (0..self.coeffs.len())
            .map(|f| (self.coeffs[self.grid.mirror(f)] - self.coeffs[f].conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Replace coefficients by their Hermitian part `(û(ξ) + conj û(-ξ))/2`.
    pub fn symmetrized(&self) -> SpectralField {
        let coeffs = (0..self.coeffs.len())
            .map(|f| (self.coeffs[f] + self.coeffs[self.grid.mirror(f)].conj()) * 0.5)
            .collect();
        SpectralField { grid: self.grid, coeffs }
    }
}

pub fn forward_transform(u: &RealField) -> SpectralField {
    let data = u.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    SpectralField { grid: u.grid, coeffs: fft::forward_complex(&u.grid, data) }
}

/// Inverse transform; rejects coefficient arrays that are not Hermitian to
/// [`HERMITIAN_TOL`] relative to their largest entry.
pub fn inverse_transform(u: &SpectralField) -> Result<RealField> {
    let scale = u.coeff_max();
    let asymmetry = u.hermitian_defect();
    if asymmetry > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian { asymmetry, scale });
    }
    let data = fft::inverse_complex(&u.grid, &u.coeffs);
    Ok(RealField { grid: u.grid, values: data.into_iter().map(|c| c.re).collect() })
}

/// Complex samples of a (possibly non-Hermitian) coefficient array.
pub fn to_physical(u: &SpectralField) -> Vec<Complex64> {
    fft::inverse_complex(&u.grid, &u.coeffs)
}

/// Coefficients of complex samples.
pub fn from_physical(grid: GridSpec, samples: Vec<Complex64>) -> SpectralField {
    SpectralField { grid, coeffs: fft::forward_complex(&grid, samples) }
}

/// `Λ^α`: multiply by `|ξ|^α`, with the zero mode sent to 0.
pub fn fractional_laplacian(u: &SpectralField, alpha: f64) -> Result<SpectralField> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::Parameter(format!("alpha must be positive, got {alpha}")));
    }
    let norms = u.grid.xi_norms();
    Ok(u.map_multiplier(|f| if norms[f] == 0.0 { 0.0 } else { norms[f].powf(alpha) }))
}

/// Multiply by `i·ξ_axis`, zeroing the Nyquist row `k_axis = -N/2`.
pub fn partial_derivative(u: &SpectralField, axis: usize) -> SpectralField {
    let grid = u.grid;
    let nyq = grid.points() / 2;
    let dxi = grid.dxi();
    let coeffs = u
        .coeffs
        .iter()
        .enumerate()
        .map(|(f, c)| {
            let idx = grid.unravel(f);
            if idx[axis] == nyq {
                Complex64::default()
            } else {
                let xi = grid.signed_k(idx[axis]) as f64 * dxi;
                Complex64::new(-c.im * xi, c.re * xi)
            }
        })
        .collect();
    SpectralField { grid, coeffs }
}

pub fn gradient(u: &SpectralField) -> Vec<SpectralField> {
    (0..u.grid.dim()).map(|axis| partial_derivative(u, axis)).collect()
}

/// `Σ_i i·ξ_i V_i` with the same Nyquist convention as [`gradient`].
pub fn divergence(v: &[SpectralField]) -> Result<SpectralField> {
    let first = v.first().ok_or_else(|| Error::Parameter("empty vector field".into()))?;
    if v.len() != first.grid.dim() {
        return Err(Error::Parameter(format!(
            "divergence needs {} components, got {}",
            first.grid.dim(),
            v.len()
        )));
    }
    let mut out = SpectralField::zeros(first.grid);
    for (axis, comp) in v.iter().enumerate() {
        first.ensure_same_grid(comp)?;
        out.axpy(1.0, &partial_derivative(comp, axis));
    }
    out.coeffs[0] = Complex64::default();
    Ok(out)
}

/// Whether a per-axis wavenumber survives the 2/3 rule (`3|k| < N`).
pub fn is_retained(grid: &GridSpec, k: i64) -> bool {
    3 * k.unsigned_abs() < grid.points() as u64
}

/// 2/3-rule truncation: zero every coefficient with some `|k_i| ≥ N/3`.
pub fn dealias(u: &SpectralField) -> SpectralField {
    let grid = u.grid;
    let mask = dealias_mask(&grid);
    u.apply_table(&mask)
}

/// 0/1 mask of the retained box.
pub fn dealias_mask(grid: &GridSpec) -> Vec<f64> {
    (0..grid.len())
        .map(|f| {
            let k = grid.wavenumbers(f);
            if k[..grid.dim()].iter().all(|&k| is_retained(grid, k)) {
                1.0
            } else {
                0.0
            }
        })
        .collect()
}

/// Pseudo-spectral product `dealias(F[u·v])`.
pub fn product(u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    u.ensure_same_grid(v)?;
    let a = to_physical(u);
    let b = to_physical(v);
    let prod = a.iter().zip(&b).map(|(x, y)| x * y).collect();
    Ok(dealias(&from_physical(u.grid, prod)))
}
