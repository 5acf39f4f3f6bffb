//! Seeded, reproducible test data: Gaussians and block-localized bumps.

use std::ops::RangeInclusive;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::lp::profile;
use crate::spectral::{dealias, SpectralField};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Transform of `amplitude·exp(−|x|²/(2w²))`, dealiased.
pub fn gaussian(grid: GridSpec, amplitude: f64, width: f64) -> Result<SpectralField> {
    if !(width > 0.0) {
        return Err(Error::Parameter(format!("gaussian width must be positive, got {width}")));
    }
    let n = grid.dim() as i32;
    let scale = amplitude * (2.0 * std::f64::consts::PI * width * width).powf(n as f64 / 2.0);
    let u = SpectralField::from_symbol(grid, |xi| {
        let r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        Complex64::new(scale * (-0.5 * width * width * r2).exp(), 0.0)
    });
    Ok(dealias(&u))
}

/// `a·φ_j(ξ)·e^{−iθ·sgn(ξ·e)}·e^{−iξ·x0}` with random direction `e`, phase `θ` and shift `x0`.
pub fn block_bump(grid: GridSpec, j: i32, amplitude: f64, rng: &mut impl Rng) -> SpectralField {
    let n = grid.dim();
    let mut e = [0.0; 3];
    loop {
        for c in e.iter_mut().take(n) {
            *c = rng.gen_range(-1.0..1.0);
        }
        if e.iter().map(|c| c * c).sum::<f64>() > 1e-2 {
            break;
        }
    }
    let theta = rng.gen_range(0.0..std::f64::consts::TAU);
    let mut x0 = [0.0; 3];
    let l = grid.half_period();
    for c in x0.iter_mut().take(n) {
        *c = rng.gen_range(-0.5 * l..0.5 * l);
    }
    let scale = 2f64.powi(-j);
    let u = SpectralField::from_symbol(grid, |xi| {
        let r = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
        let w = profile(r * scale);
        if w == 0.0 {
            return Complex64::default();
        }
        let dir: f64 = (0..3).map(|i| xi[i] * e[i]).sum();
        let shift: f64 = (0..3).map(|i| xi[i] * x0[i]).sum();
        let sgn = if dir > 0.0 { 1.0 } else if dir < 0.0 { -1.0 } else { 0.0 };
        Complex64::from_polar(amplitude * w, -theta * sgn - shift)
    });
    dealias(&u)
}

/// Sum of `count` bumps on blocks drawn from `blocks`, amplitudes in `[0.1, 1)`.
pub fn random_block_field(
    grid: GridSpec,
    blocks: RangeInclusive<i32>,
    count: usize,
    rng: &mut impl Rng,
) -> SpectralField {
    let mut u = SpectralField::zeros(grid);
    for _ in 0..count {
        let j = rng.gen_range(blocks.clone());
        let a = rng.gen_range(0.1..1.0);
        u.axpy(1.0, &block_bump(grid, j, a, rng));
    }
    u
}

/// Largest `j` whose block support `(8/3)2^j` stays inside the retained band.
pub fn top_unaliased_block(grid: &GridSpec) -> i32 {
    let limit = grid.dxi() * ((grid.points() - 1) / 3) as f64;
    ((limit * 3.0 / 8.0).log2() + 1e-12).floor() as i32
}
