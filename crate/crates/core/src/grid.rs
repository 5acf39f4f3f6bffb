use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Periodic box `[-L, L)^n` sampled with `N` points per axis.
///
/// Storage order for both samples and coefficients is row-major with axis 0
/// slowest. Along each axis, sample index `m` sits at `x = -L + m·h` and
/// coefficient index `i` carries the signed wavenumber `k = i` for `i < N/2`
/// and `k = i - N` otherwise (standard FFT order).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    dim: usize,
    points: usize,
    half_period: f64,
}

impl GridSpec {
    pub fn new(dim: usize, points: usize, half_period: f64) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::Grid(format!("dimension must be 1, 2 or 3, got {dim}")));
        }
        if points < 8 || !points.is_multiple_of(2) {
            return Err(Error::Grid(format!("N must be even and >= 8, got {points}")));
        }
        if !(half_period.is_finite() && half_period > 0.0) {
            return Err(Error::Grid(format!("L must be positive, got {half_period}")));
        }
        Ok(GridSpec { dim, points, half_period })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn half_period(&self) -> f64 {
        self.half_period
    }

    /// Frequency spacing `π/L`.
    pub fn dxi(&self) -> f64 {
        PI / self.half_period
    }

    /// Physical spacing `2L/N`.
    pub fn dx(&self) -> f64 {
        2.0 * self.half_period / self.points as f64
    }

    /// Torus volume `(2L)^n`.
    pub fn volume(&self) -> f64 {
        (2.0 * self.half_period).powi(self.dim as i32)
    }

    /// Frequency cell volume `dxi^n` used by Riemann sums in ξ.
    pub fn cell(&self) -> f64 {
        self.dxi().powi(self.dim as i32)
    }

    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Signed wavenumber for a per-axis storage index.
    pub fn signed_k(&self, i: usize) -> i64 {
        let n = self.points as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Per-axis storage index for a signed wavenumber in `[-N/2, N/2)`.
    pub fn index_of_k(&self, k: i64) -> Option<usize> {
        let n = self.points as i64;
        if k < -n / 2 || k >= n / 2 {
            None
        } else {
            Some(k.rem_euclid(n) as usize)
        }
    }

    /// Per-axis indices of a flat offset (unused trailing axes are zero).
    pub fn unravel(&self, flat: usize) -> [usize; 3] {
        let mut out = [0usize; 3];
        let mut rest = flat;
        for axis in (0..self.dim).rev() {
            out[axis] = rest % self.points;
            rest /= self.points;
        }
        out
    }

    pub fn ravel(&self, idx: [usize; 3]) -> usize {
        idx[..self.dim].iter().fold(0, |acc, &i| acc * self.points + i)
    }

    /// Signed wavenumber triple of a flat coefficient offset.
    pub fn wavenumbers(&self, flat: usize) -> [i64; 3] {
        let idx = self.unravel(flat);
        let mut k = [0i64; 3];
        for axis in 0..self.dim {
            k[axis] = self.signed_k(idx[axis]);
        }
        k
    }

    /// Flat offset of a signed wavenumber triple.
    pub fn flat_of_k(&self, k: [i64; 3]) -> Option<usize> {
        let mut idx = [0usize; 3];
        for axis in 0..self.dim {
            idx[axis] = self.index_of_k(k[axis])?;
        }
        Some(self.ravel(idx))
    }

    /// Flat offset of the mirrored wavenumber `-k`; the Nyquist index maps to itself.
    pub fn mirror(&self, flat: usize) -> usize {
        let idx = self.unravel(flat);
        let mut out = [0usize; 3];
        for axis in 0..self.dim {
            out[axis] = (self.points - idx[axis]) % self.points;
        }
        self.ravel(out)
    }

    /// Physical wavevector `ξ = dxi·k`.
    pub fn xi(&self, flat: usize) -> [f64; 3] {
        let k = self.wavenumbers(flat);
        let dxi = self.dxi();
        [k[0] as f64 * dxi, k[1] as f64 * dxi, k[2] as f64 * dxi]
    }

    /// `|ξ|` for every lattice point, in storage order.
    pub fn xi_norms(&self) -> Vec<f64> {
        (0..self.len())
            .map(|f| {
                let xi = self.xi(f);
                (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt()
            })
            .collect()
    }

    /// Physical coordinates of a flat sample offset.
    pub fn x(&self, flat: usize) -> [f64; 3] {
        let idx = self.unravel(flat);
        let h = self.dx();
        let mut x = [0.0; 3];
        for axis in 0..self.dim {
            x[axis] = -self.half_period + idx[axis] as f64 * h;
        }
        x
    }

    /// Whether any axis sits on the Nyquist index `k = -N/2`.
    pub fn has_nyquist(&self, flat: usize) -> bool {
        let idx = self.unravel(flat);
        idx[..self.dim].contains(&(self.points / 2))
    }

    /// Dyadic band `[j_min, j_max]`: the smallest `j` with `2^j ≥ (4/3)·dxi` and the
    /// largest `j` with `(8/3)·2^j ≤ dxi·N/2`.
    pub fn dyadic_band(&self) -> (i32, i32) {
        const SLACK: f64 = 1e-12;
        let lo = (4.0 / 3.0) * self.dxi() * (1.0 - SLACK);
        let hi = self.dxi() * self.points as f64 / 2.0 * (1.0 + SLACK);
        let mut j_min = lo.log2().floor() as i32 - 1;
        while 2f64.powi(j_min) < lo {
            j_min += 1;
        }
        let mut j_max = (hi * 3.0 / 8.0).log2().ceil() as i32 + 1;
        while (8.0 / 3.0) * 2f64.powi(j_max) > hi {
            j_max -= 1;
        }
        (j_min, j_max)
    }
}
