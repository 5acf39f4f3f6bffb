//! Littlewood–Paley machinery: dyadic partition of unity, the block operators
//! `Δ_j` and `S_j`, Fourier–Besov norms, and the Bony paraproduct split.
//!
//! The radial profile is built from a smooth cutoff `χ` with `χ = 1` on
//! `|ξ| ≤ 3/4` and `χ = 0` on `|ξ| ≥ 4/3`:
//!
//! ```text
//! φ(ξ) = χ(ξ/2) − χ(ξ),   supp φ ⊂ {3/4 ≤ |ξ| ≤ 8/3},   φ = 1 on 4/3 ≤ |ξ| ≤ 3/2
//! ```
//!
//! so `Σ_{j=a}^{b} φ(2^{-j}ξ) = χ(2^{-b-1}ξ) − χ(2^{-a}ξ)` telescopes, and the
//! low-pass symbol is `ψ_j(ξ) = χ(2^{-j}ξ)`, which also carries the zero mode.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::grid::GridSpec;
use crate::spectral::{dealias, from_physical, to_physical, SpectralField};

const CHI_FLAT: f64 = 0.75;
const CHI_ZERO: f64 = 4.0 / 3.0;
const UNITY_TOL: f64 = 1e-12;

fn smooth_ramp(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

/// The C^∞ radial cutoff `χ(r)`.
pub fn cutoff(r: f64) -> f64 {
    if r <= CHI_FLAT {
        1.0
    } else if r >= CHI_ZERO {
        0.0
    } else {
        let s = (r - CHI_FLAT) / (CHI_ZERO - CHI_FLAT);
        let a = smooth_ramp(1.0 - s);
        a / (a + smooth_ramp(s))
    }
}

/// The dyadic bump `φ(r) = χ(r/2) − χ(r)`.
pub fn profile(r: f64) -> f64 {
    cutoff(0.5 * r) - cutoff(r)
}

/// Regularity and integrability indices of a homogeneous Fourier–Besov norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FBNormParams {
    pub beta: f64,
    pub p: Exponent,
    pub q: Exponent,
}

impl FBNormParams {
    pub fn new(beta: f64, p: Exponent, q: Exponent) -> Self {
        FBNormParams { beta, p, q }
    }

    pub fn with_beta(self, beta: f64) -> Self {
        FBNormParams { beta, ..self }
    }
}

/// Littlewood–Paley masks tabulated on one grid. Immutable once built.
#[derive(Debug, Clone)]
pub struct DyadicPartition {
    grid: GridSpec,
    j_min: i32,
    j_max: i32,
    masks: Vec<Vec<f64>>,
    lowpass: Vec<Vec<f64>>,
    high_residue: Vec<f64>,
    band: (f64, f64),
}

impl DyadicPartition {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn j_min(&self) -> i32 {
        self.j_min
    }

    pub fn j_max(&self) -> i32 {
        self.j_max
    }

    pub fn j_range(&self) -> std::ops::RangeInclusive<i32> {
        self.j_min..=self.j_max
    }

    pub fn block_count(&self) -> usize {
        (self.j_max - self.j_min + 1) as usize
    }

    /// `φ_j` on the lattice, if `j` is resolved.
    pub fn mask(&self, j: i32) -> Option<&[f64]> {
        if self.j_range().contains(&j) {
            Some(&self.masks[(j - self.j_min) as usize])
        } else {
            None
        }
    }

    /// `ψ_j = χ(2^{-j}·)` for `j ∈ [j_min, j_max + 1]`.
    pub fn lowpass_mask(&self, j: i32) -> Option<&[f64]> {
        if (self.j_min..=self.j_max + 1).contains(&j) {
            Some(&self.lowpass[(j - self.j_min) as usize])
        } else {
            None
        }
    }

    /// Radii `[(4/3)·2^{j_min}, (3/2)·2^{j_max}]` on which `Σ_j φ_j = 1`.
    pub fn resolved_band(&self) -> (f64, f64) {
        self.band
    }

    /// `Σ_j φ_j` over the resolved blocks.
    pub fn mask_sum(&self) -> Vec<f64> {
        let mut sum = vec![0.0; self.grid.len()];
        for m in &self.masks {
            for (s, v) in sum.iter_mut().zip(m) {
                *s += v;
            }
        }
        sum
    }

    /// Block masks padded with the two residues: index 0 is the low-pass
    /// `ψ_{j_min}` (zero mode and sub-band frequencies), the last entry is
    /// `1 − ψ_{j_max+1}`. They sum to one at every lattice point.
    fn extended_masks(&self) -> Vec<&[f64]> {
        let mut out: Vec<&[f64]> = Vec::with_capacity(self.masks.len() + 2);
        out.push(&self.lowpass[0]);
        out.extend(self.masks.iter().map(|m| m.as_slice()));
        out.push(&self.high_residue);
        out
    }
}

/// Tabulate `φ_j`, `ψ_j` and verify the partition of unity on the resolved band.
pub fn build_partition(grid: &GridSpec) -> Result<DyadicPartition> {
    let (j_min, j_max) = grid.dyadic_band();
    if j_max - j_min + 1 < 3 {
        return Err(Error::Config(format!(
            "grid (n={}, N={}, L={}) hosts only {} dyadic blocks, need at least 3",
            grid.dim(),
            grid.points(),
            grid.half_period(),
            (j_max - j_min + 1).max(0)
        )));
    }
    let norms = grid.xi_norms();
    let masks: Vec<Vec<f64>> = (j_min..=j_max)
        .map(|j| {
            let s = 2f64.powi(-j);
            norms.iter().map(|&r| profile(s * r)).collect()
        })
        .collect();
    let lowpass: Vec<Vec<f64>> = (j_min..=j_max + 1)
        .map(|j| {
            let s = 2f64.powi(-j);
            norms.iter().map(|&r| cutoff(s * r)).collect()
        })
        .collect();
    let high_residue = lowpass[lowpass.len() - 1].iter().map(|v| 1.0 - v).collect();
    let band = ((4.0 / 3.0) * 2f64.powi(j_min), 1.5 * 2f64.powi(j_max));

    let partition = DyadicPartition { grid: *grid, j_min, j_max, masks, lowpass, high_residue, band };

    let sum = partition.mask_sum();
    let worst = norms
        .iter()
        .zip(&sum)
        .filter(|(&r, _)| r >= band.0 && r <= band.1)
        .map(|(_, s)| (s - 1.0).abs())
        .fold(0.0, f64::max);
    if worst > UNITY_TOL {
        return Err(Error::Config(format!("partition of unity violated by {worst:e}")));
    }
    Ok(partition)
}

/// `Δ_j u`. Unresolved `j` yields the zero field.
pub fn block(u: &SpectralField, j: i32, partition: &DyadicPartition) -> SpectralField {
    match partition.mask(j) {
        Some(m) => u.apply_table(m),
        None => {
            log::warn!(
                "block index {j} outside resolved range [{}, {}]; returning zero",
                partition.j_min(),
                partition.j_max()
            );
            SpectralField::zeros(u.grid)
        }
    }
}

/// `S_j u = χ(2^{-j}D) u`.
pub fn lowpass(u: &SpectralField, j: i32, partition: &DyadicPartition) -> SpectralField {
    match partition.lowpass_mask(j) {
        Some(m) => u.apply_table(m),
        None => {
            let s = 2f64.powi(-j);
            let norms = u.grid.xi_norms();
            u.map_multiplier(|f| cutoff(s * norms[f]))
        }
    }
}

/// `‖φ_j û‖_{L^p(ξ)}` as a Riemann sum, for every resolved `j`.
pub fn block_norms(u: &SpectralField, p: Exponent, partition: &DyadicPartition) -> Vec<f64> {
    let cell = u.grid.cell();
    partition
        .masks
        .iter()
        .map(|m| {
            let terms = m
                .iter()
                .zip(&u.coeffs)
                .filter(|(w, _)| **w != 0.0)
                .map(|(w, c)| (cell, w * c.norm()));
            p.weighted_norm(terms)
        })
        .collect()
}

/// Outer `ℓ^q` sum `(Σ_j 2^{jβq} b_j^q)^{1/q}` over block norms starting at `j_min`.
pub fn besov_sum(blocks: &[f64], j_min: i32, beta: f64, q: Exponent) -> f64 {
    q.seq_norm(
        blocks
            .iter()
            .enumerate()
            .map(|(i, b)| 2f64.powf((j_min + i as i32) as f64 * beta) * b),
    )
}

/// Homogeneous Fourier–Besov norm over the resolved blocks.
pub fn fb_norm(u: &SpectralField, params: FBNormParams, partition: &DyadicPartition) -> f64 {
    let blocks = block_norms(u, params.p, partition);
    besov_sum(&blocks, partition.j_min(), params.beta, params.q)
}

/// Fraction of non-zero-mode L² energy lying outside the resolved band,
/// `Σ |(1 − Σ_j φ_j) û|² / Σ |û|²` over `ξ ≠ 0`.
pub fn tail_fraction(u: &SpectralField, partition: &DyadicPartition) -> f64 {
    let sum = partition.mask_sum();
    let (mut tail, mut total) = (0.0, 0.0);
    for (f, c) in u.coeffs.iter().enumerate().skip(1) {
        let e = c.norm_sqr();
        total += e;
        tail += (1.0 - sum[f]).powi(2) * e;
    }
    if total == 0.0 {
        0.0
    } else {
        tail / total
    }
}

/// Bony decomposition `uv = T_u v + T_v u + R(u, v)`.
#[derive(Debug, Clone)]
pub struct Paraproduct {
    pub t_uv: SpectralField,
    pub t_vu: SpectralField,
    pub remainder: SpectralField,
}

impl Paraproduct {
    pub fn sum(&self) -> SpectralField {
        self.t_uv.add(&self.t_vu).add(&self.remainder)
    }
}

fn pointwise(a: &[Complex64], b: &[Complex64], acc: &mut [Complex64]) {
    for ((x, y), out) in a.iter().zip(b).zip(acc.iter_mut()) {
        *out += x * y;
    }
}

/// Bony split computed pseudo-spectrally, each term dealiased.
///
/// Sub-band and super-band content (zero mode included) enter as two residue
/// blocks at `j_min − 1` and `j_max + 1`, so `T_u v + T_v u + R(u, v)` equals the
/// dealiased product exactly up to rounding.
pub fn paraproduct(
    u: &SpectralField,
    v: &SpectralField,
    partition: &DyadicPartition,
) -> Result<Paraproduct> {
    u.ensure_same_grid(v)?;
    if u.grid != *partition.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = u.grid;
    let masks = partition.extended_masks();
    let nb = masks.len();
    let phys = |f: &SpectralField, m: &[f64]| to_physical(&f.apply_table(m));
    let du: Vec<Vec<Complex64>> = masks.iter().map(|m| phys(u, m)).collect();
    let dv: Vec<Vec<Complex64>> = masks.iter().map(|m| phys(v, m)).collect();

    // Running low-pass S_{k-1} = Σ_{i ≤ k-2} Δ_i in physical space.
    let len = grid.len();
    let mut t_uv = vec![Complex64::default(); len];
    let mut t_vu = vec![Complex64::default(); len];
    let mut rem = vec![Complex64::default(); len];
    let mut su = vec![Complex64::default(); len];
    let mut sv = vec![Complex64::default(); len];
    for k in 0..nb {
        if k >= 2 {
            for i in 0..len {
                su[i] += du[k - 2][i];
                sv[i] += dv[k - 2][i];
            }
            pointwise(&su, &dv[k], &mut t_uv);
            pointwise(&sv, &du[k], &mut t_vu);
        }
        for l in k.saturating_sub(1)..=(k + 1).min(nb - 1) {
            pointwise(&du[k], &dv[l], &mut rem);
        }
    }
    let finish = |x: Vec<Complex64>| dealias(&from_physical(grid, x));
    Ok(Paraproduct { t_uv: finish(t_uv), t_vu: finish(t_vu), remainder: finish(rem) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{forward_transform, product, RealField};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn grid_dxi(dim: usize, n: usize, dxi: f64) -> GridSpec {
        GridSpec::new(dim, n, PI / dxi).unwrap()
    }

    #[test]
    fn profile_support_and_plateau() {
        assert_eq!(profile(0.74), 0.0);
        assert_eq!(profile(2.67), 0.0);
        assert!(profile(0.8) > 0.0);
        assert!(profile(2.6) > 0.0);
        for r in [4.0 / 3.0, 1.4, 1.5] {
            assert_eq!(profile(r), 1.0);
        }
        for i in 0..1000 {
            let r = 3.0 * i as f64 / 1000.0;
            assert!((0.0..=1.0).contains(&profile(r)));
        }
    }

    #[test]
    fn too_coarse_grid_is_rejected() {
        let g = GridSpec::new(1, 16, PI).unwrap();
        assert!(matches!(build_partition(&g), Err(Error::Config(_))));
    }

    #[test]
    fn unity_and_quasi_orthogonality() {
        let g = grid_dxi(2, 64, 0.75);
        let p = build_partition(&g).unwrap();
        let (lo, hi) = p.resolved_band();
        let sum = p.mask_sum();
        for (f, r) in g.xi_norms().iter().enumerate() {
            if *r >= lo && *r <= hi {
                assert!((sum[f] - 1.0).abs() < 1e-12);
            }
        }
        for j in p.j_range() {
            for k in p.j_range() {
                if (j - k).abs() >= 2 {
                    let (a, b) = (p.mask(j).unwrap(), p.mask(k).unwrap());
                    assert!(a.iter().zip(b).all(|(x, y)| x * y == 0.0));
                }
            }
        }
    }

    #[test]
    fn plateau_is_covered_by_one_block() {
        let g = grid_dxi(1, 256, 0.05);
        let p = build_partition(&g).unwrap();
        let norms = g.xi_norms();
        for j in p.j_range() {
            let m = p.mask(j).unwrap();
            for (f, &r) in norms.iter().enumerate() {
                let s = r / 2f64.powi(j);
                if (4.0 / 3.0..=1.5).contains(&s) {
                    assert_eq!(m[f], 1.0);
                    for k in [j - 1, j + 1] {
                        if let Some(n) = p.mask(k) {
                            assert_eq!(n[f], 0.0);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn block_outside_range_is_zero() {
        let g = grid_dxi(1, 64, 0.75);
        let p = build_partition(&g).unwrap();
        let u = SpectralField::from_symbol(g, |_| Complex64::new(1.0, 0.0));
        assert_eq!(block(&u, p.j_max() + 5, &p).coeff_max(), 0.0);
        assert_eq!(block(&SpectralField::zeros(g), p.j_min(), &p).coeff_max(), 0.0);
    }

    #[test]
    fn lowpass_identities() {
        let g = grid_dxi(1, 128, 0.75);
        let p = build_partition(&g).unwrap();
        let (lo, hi) = p.resolved_band();
        let norms = g.xi_norms();
        // field with DC plus content strictly inside the resolved band
        let u = SpectralField::from_symbol(g, |xi| {
            let r = xi[0].abs();
            if r == 0.0 {
                Complex64::new(3.0, 0.0)
            } else if r >= lo && r <= hi {
                Complex64::new((r).cos(), 0.0)
            } else {
                Complex64::default()
            }
        });
        let top = lowpass(&u, p.j_max() + 1, &p);
        assert!(top.sub(&u).coeff_max() < 1e-15);
        let bottom = lowpass(&u, p.j_min(), &p);
        assert_eq!(bottom.coeffs[0], Complex64::new(3.0, 0.0));
        assert!(bottom.coeffs[1..].iter().all(|c| c.norm() == 0.0));
        for j in p.j_min()..=p.j_max() + 1 {
            let psi = p.lowpass_mask(j).unwrap();
            for (f, &r) in norms.iter().enumerate() {
                if r > hi {
                    continue;
                }
                let tail: f64 = (j..=p.j_max()).map(|k| p.mask(k).unwrap()[f]).sum();
                assert!((psi[f] + tail - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn fb_norm_of_a_mask() {
        let g = grid_dxi(1, 256, 0.05);
        let p = build_partition(&g).unwrap();
        assert!(p.j_range().contains(&0));
        let u = SpectralField::new(g, p.mask(0).unwrap().iter().map(|&m| Complex64::new(m, 0.0)).collect())
            .unwrap();
        let inf = Exponent::INFINITY;
        assert_eq!(fb_norm(&u, FBNormParams::new(0.0, inf, inf), &p), 1.0);
        // q = 1: neighbours contribute max φ_0 φ_{±1} ≤ 1/4 each
        let beta = 0.3;
        let one = fb_norm(&u, FBNormParams::new(beta, inf, Exponent::ONE), &p);
        let b = block_norms(&u, inf, &p);
        let i0 = (0 - p.j_min()) as usize;
        let expected = 1.0 + 2f64.powf(-beta) * b[i0 - 1] + 2f64.powf(beta) * b[i0 + 1];
        assert!((one - expected).abs() < 1e-14);
        assert!(b[i0 - 1] <= 0.25 + 1e-15 && b[i0 + 1] <= 0.25 + 1e-15);
        assert_eq!(fb_norm(&SpectralField::zeros(g), FBNormParams::new(1.0, Exponent::TWO, Exponent::TWO), &p), 0.0);
    }

    #[test]
    fn single_block_beta_shift() {
        let g = grid_dxi(1, 256, 0.05);
        let p = build_partition(&g).unwrap();
        let j0 = 1;
        // support strictly on the plateau of φ_{j0}
        let u = SpectralField::from_symbol(g, |xi| {
            let s = xi[0].abs() / 2f64.powi(j0);
            if (4.0 / 3.0..=1.5).contains(&s) {
                Complex64::new(1.0, 0.5)
            } else {
                Complex64::default()
            }
        });
        let params = FBNormParams::new(0.4, Exponent::TWO, Exponent::new(3.0).unwrap());
        let a = fb_norm(&u, params, &p);
        let b = fb_norm(&u, params.with_beta(1.1), &p);
        assert!((b / a - 2f64.powf(j0 as f64 * 0.7)).abs() < 1e-12);
    }

    fn random_dealiased(g: GridSpec, rng: &mut ChaCha8Rng) -> SpectralField {
        let u = RealField::new(g, (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
        dealias(&forward_transform(&u))
    }

    #[test]
    fn paraproduct_reconstructs_product() {
        let g = grid_dxi(1, 128, 0.75);
        let p = build_partition(&g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..5 {
            let (u, v) = (random_dealiased(g, &mut rng), random_dealiased(g, &mut rng));
            let pp = paraproduct(&u, &v, &p).unwrap();
            let direct = product(&u, &v).unwrap();
            assert!(pp.sum().sub(&direct).coeff_norm() < 1e-12 * direct.coeff_norm());
        }
    }

    #[test]
    fn paraproduct_single_mode_square() {
        let g = grid_dxi(1, 128, 0.75);
        let p = build_partition(&g).unwrap();
        let mut u = SpectralField::zeros(g);
        let k = 10;
        u.coeffs[g.flat_of_k([k, 0, 0]).unwrap()] = Complex64::new(g.volume(), 0.0);
        let pp = paraproduct(&u, &u, &p).unwrap();
        let s = pp.sum();
        let target = g.flat_of_k([2 * k, 0, 0]).unwrap();
        for (f, c) in s.coeffs.iter().enumerate() {
            let expected = if f == target { g.volume() } else { 0.0 };
            assert!((c - Complex64::new(expected, 0.0)).norm() < 1e-10 * g.volume());
        }
    }

    #[test]
    fn paraproduct_with_constant() {
        let g = grid_dxi(1, 128, 0.75);
        let p = build_partition(&g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let v = random_dealiased(g, &mut rng);
        let mut c = SpectralField::zeros(g);
        c.coeffs[0] = Complex64::new(2.0 * g.volume(), 0.0);
        let pp = paraproduct(&c, &v, &p).unwrap();
        // a constant lives in the low residue, so it only meets low blocks of v in R
        // and every higher block through T_c v
        let direct = v.scaled(2.0);
        assert!(pp.sum().sub(&direct).coeff_norm() < 1e-12 * direct.coeff_norm());
        assert!(pp.t_vu.coeff_max() < 1e-12 * direct.coeff_max());
    }

    #[test]
    fn tail_fraction_of_band_limited_field_is_zero() {
        let g = grid_dxi(1, 128, 0.75);
        let p = build_partition(&g).unwrap();
        let (lo, hi) = p.resolved_band();
        let u = SpectralField::from_symbol(g, |xi| {
            let r = xi[0].abs();
            Complex64::new(if r >= lo && r <= hi { 1.0 } else { 0.0 }, 0.0)
        });
        assert_eq!(tail_fraction(&u, &p), 0.0);
        let w = SpectralField::from_symbol(g, |_| Complex64::new(1.0, 0.0));
        assert!(tail_fraction(&w, &p) > 0.0);
    }
}
