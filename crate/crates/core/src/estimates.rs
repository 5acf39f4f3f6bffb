//! Fitted-constant checks of the semigroup, interpolation and bilinear inequalities.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::grid::GridSpec;
use crate::lp::{build_partition, fb_norm, DyadicPartition, FBNormParams};
use crate::pressure::pressure_symbol;
use crate::record::{mixed_norm, FieldTrajectory, TrajectoryRecord};
use crate::solver::{duhamel_forcing, semigroup_apply, DuhamelRule, ModelParams, Operators};
use crate::spectral::{from_physical, partial_derivative, to_physical, SpectralField};
use crate::testfields::{random_block_field, rng, top_unaliased_block};

/// Both sides of one inequality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ratio {
    pub lhs: f64,
    pub rhs: f64,
}

impl Ratio {
    /// `lhs / rhs`; `0/0` counts as 0.
    pub fn value(&self) -> f64 {
        if self.lhs == 0.0 && self.rhs == 0.0 {
            0.0
        } else {
            self.lhs / self.rhs
        }
    }
}

fn traj_norm(traj: &FieldTrajectory, r: Exponent, params: FBNormParams, partition: &DyadicPartition) -> Result<f64> {
    mixed_norm(&traj.record(params.p, partition), r, params)
}

/// `‖u‖_{L̃^r(FB^{β+α/r})}` against `‖u0‖_{FB^β} + ‖f‖_{L̃^1(FB^β)}` for the linear problem with forcing.
pub fn verify_apriori(
    u0: &SpectralField,
    forcing: &FieldTrajectory,
    r: Exponent,
    params: FBNormParams,
    alpha: f64,
    partition: &DyadicPartition,
) -> Result<Ratio> {
    u0.ensure_same_grid(&forcing.fields[0])?;
    let h = duhamel_forcing(forcing, alpha, DuhamelRule::Exponential)?;
    let fields = forcing
        .times
        .iter()
        .zip(h)
        .map(|(&t, h)| Ok(semigroup_apply(u0, t, alpha)?.add(&h)))
        .collect::<Result<Vec<_>>>()?;
    let u = FieldTrajectory::new(forcing.times.clone(), fields)?;
    let lhs = traj_norm(&u, r, params.with_beta(params.beta + alpha * r.recip()), partition)?;
    let rhs = fb_norm(u0, params, partition) + traj_norm(forcing, Exponent::ONE, params, partition)?;
    Ok(Ratio { lhs, rhs })
}

/// `L̃^r(FB^{β+θα})` against `L̃^{r1}(FB^β)^{1−θ} · L̃^{r2}(FB^{β+α})^θ` with `1/r = (1−θ)/r1 + θ/r2`.
pub fn verify_interpolation(
    rec: &TrajectoryRecord,
    theta: f64,
    r1: Exponent,
    r2: Exponent,
    params: FBNormParams,
    alpha: f64,
) -> Result<Ratio> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::Parameter(format!("theta must lie in [0, 1], got {theta}")));
    }
    let inv = (1.0 - theta) * r1.recip() + theta * r2.recip();
    let r = if inv == 0.0 { Exponent::INFINITY } else { Exponent::new(1.0 / inv)? };
    let lhs = mixed_norm(rec, r, params.with_beta(params.beta + theta * alpha))?;
    let a = mixed_norm(rec, r1, params)?;
    let b = mixed_norm(rec, r2, params.with_beta(params.beta + alpha))?;
    Ok(Ratio { lhs, rhs: a.powf(1.0 - theta) * b.powf(theta) })
}

/// Exponents of the paraproduct estimate for `u ∂_i P v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BilinearIndices {
    pub gamma: Exponent,
    pub gamma1: Exponent,
    pub gamma2: Exponent,
    pub beta: f64,
    pub epsilon: f64,
}

impl BilinearIndices {
    /// Indices used inside the Duhamel bound: `β + 1` for the product and `ε = α/2 − σ − 1`
    /// when that is admissible, otherwise `max{0, −σ} + 1/4`.
    pub fn for_model(params: &ModelParams) -> Self {
        let sigma = params.sigma();
        let floor = f64::max(0.0, -sigma);
        let eps = params.alpha() / 2.0 - sigma - 1.0;
        BilinearIndices {
            gamma: Exponent::ONE,
            gamma1: Exponent::TWO,
            gamma2: Exponent::TWO,
            beta: params.beta() + 1.0,
            epsilon: if eps > floor { eps } else { floor + 0.25 },
        }
    }

    fn validate(&self, sigma: f64) -> Result<()> {
        if !(self.epsilon > f64::max(0.0, -sigma)) {
            return Err(Error::Parameter(format!("epsilon must exceed max(0, -sigma), got {}", self.epsilon)));
        }
        if !(self.beta > 0.0) {
            return Err(Error::Parameter(format!("product index must be positive, got {}", self.beta)));
        }
        let gap = self.gamma.recip() - self.gamma1.recip() - self.gamma2.recip();
        if gap.abs() > 1e-12 {
            return Err(Error::Parameter("need 1/gamma = 1/gamma1 + 1/gamma2".into()));
        }
        Ok(())
    }
}

/// `u ∂_i P v` for each axis, dealiased.
pub fn pressure_products(u: &SpectralField, v: &SpectralField, symbol: &[f64]) -> Result<Vec<SpectralField>> {
    u.ensure_same_grid(v)?;
    let phys_u = to_physical(u);
    let pv = v.apply_table(symbol);
    let mask = crate::spectral::dealias_mask(&u.grid);
    Ok((0..u.grid.dim())
        .map(|axis| {
            let g = to_physical(&partial_derivative(&pv, axis));
            let prod = phys_u.iter().zip(&g).map(|(a, b)| a * b).collect();
            from_physical(u.grid, prod).apply_table(&mask)
        })
        .collect())
}

/// Constant-in-time check of the paraproduct estimate. Over a horizon `T` every side picks up
/// `T^{1/γ} = T^{1/γ1}·T^{1/γ2}`, so the ratio reduces to single-time norms.
pub fn verify_bilinear(
    u: &SpectralField,
    v: &SpectralField,
    idx: BilinearIndices,
    params: &ModelParams,
    partition: &DyadicPartition,
) -> Result<Ratio> {
    idx.validate(params.sigma())?;
    let symbol = pressure_symbol(params.pressure(), &u.grid)?;
    let norm = |w: &SpectralField, beta: f64| fb_norm(w, FBNormParams::new(beta, params.p(), params.q()), partition);
    let lhs = pressure_products(u, v, &symbol)?
        .iter()
        .map(|w| norm(w, idx.beta))
        .fold(0.0, f64::max);
    let low = params.dim() as f64 * (1.0 - params.p().recip()) - idx.epsilon;
    let high = idx.beta + params.sigma() + idx.epsilon;
    let rhs = norm(u, low) * norm(v, high) + norm(v, low) * norm(u, high);
    Ok(Ratio { lhs, rhs })
}

/// `‖H(u,v)‖_X` against `‖u‖_X‖v‖_X` on the Picard working space with time exponent `r`.
pub fn verify_duhamel_bilinear(
    u: &FieldTrajectory,
    v: &FieldTrajectory,
    params: &ModelParams,
    r: Exponent,
    partition: &DyadicPartition,
) -> Result<Ratio> {
    if u.times != v.times {
        return Err(Error::Quadrature("trajectories must share time nodes".into()));
    }
    let ops = Operators::new(u.fields[0].grid, params)?;
    let forcing = u
        .fields
        .iter()
        .zip(&v.fields)
        .map(|(a, b)| ops.bilinear(a, b))
        .collect::<Result<Vec<_>>>()?;
    let h = duhamel_forcing(&FieldTrajectory::new(u.times.clone(), forcing)?, params.alpha(), DuhamelRule::Exponential)?;
    let h = FieldTrajectory::new(u.times.clone(), h)?;
    let x = params.working_norm(r);
    let lhs = traj_norm(&h, r, x, partition)?;
    let rhs = traj_norm(u, r, x, partition)? * traj_norm(v, r, x, partition)?;
    Ok(Ratio { lhs, rhs })
}

/// `1.5 ×` the largest observed ratio.
pub fn fit_global_constant(ratios: &[f64]) -> Result<f64> {
    if ratios.is_empty() {
        return Err(Error::Parameter("cannot fit a constant to an empty batch".into()));
    }
    if ratios.iter().any(|r| !r.is_finite() || *r < 0.0) {
        return Err(Error::NonFinite("batch contains a non-finite or negative ratio".into()));
    }
    Ok(1.5 * ratios.iter().copied().fold(0.0, f64::max))
}

/// Summary of one seeded batch.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchReport {
    pub name: &'static str,
    pub ratios: Vec<f64>,
}

impl BatchReport {
    pub fn max(&self) -> f64 {
        self.ratios.iter().copied().fold(0.0, f64::max)
    }
}

fn bump_range(grid: &GridSpec, partition: &DyadicPartition) -> std::ops::RangeInclusive<i32> {
    partition.j_min()..=top_unaliased_block(grid).max(partition.j_min())
}

/// Random bump pairs for the paraproduct estimate. Blocks are limited to those that fit inside
/// `band_grid`'s retained band so the same physical data can be compared across resolutions.
pub fn bilinear_batch(
    grid: GridSpec,
    band_grid: GridSpec,
    params: &ModelParams,
    cases: usize,
    seed: u64,
) -> Result<BatchReport> {
    let partition = build_partition(&grid)?;
    let blocks = bump_range(&band_grid, &build_partition(&band_grid)?);
    let idx = BilinearIndices::for_model(params);
    let ratios = (0..cases)
        .into_par_iter()
        .map(|c| {
            let mut g = rng(seed.wrapping_add(c as u64));
            let u = random_block_field(grid, blocks.clone(), 2, &mut g);
            let v = random_block_field(grid, blocks.clone(), 2, &mut g);
            verify_bilinear(&u, &v, idx, params, &partition).map(|r| r.value())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BatchReport { name: "bilinear", ratios })
}

/// Random data and forcing `f(t) = cos(ωt)·g` for the linear a priori bound, cycling `r ∈ {1, 2, ∞}`.
pub fn apriori_batch(grid: GridSpec, params: &ModelParams, horizon: f64, cases: usize, seed: u64) -> Result<BatchReport> {
    let partition = build_partition(&grid)?;
    let blocks = bump_range(&grid, &partition);
    let rs = [Exponent::ONE, Exponent::TWO, Exponent::INFINITY];
    let ratios = (0..cases)
        .into_par_iter()
        .map(|c| {
            let mut g = rng(seed.wrapping_add(c as u64));
            let u0 = random_block_field(grid, blocks.clone(), 2, &mut g);
            let shape = random_block_field(grid, blocks.clone(), 2, &mut g);
            let omega: f64 = rand::Rng::gen_range(&mut g, 0.0..10.0);
            let f = FieldTrajectory::uniform(horizon, 64, |t| shape.scaled((omega * t).cos()))?;
            verify_apriori(&u0, &f, rs[c % 3], params.data_norm(), params.alpha(), &partition).map(|r| r.value())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BatchReport { name: "apriori", ratios })
}

/// Picard-space bilinear ratio on semigroup evolutions of random data.
pub fn duhamel_batch(grid: GridSpec, params: &ModelParams, horizon: f64, r: Exponent, cases: usize, seed: u64) -> Result<BatchReport> {
    let partition = build_partition(&grid)?;
    let blocks = bump_range(&grid, &partition);
    let ops = Operators::new(grid, params)?;
    let ratios = (0..cases)
        .into_par_iter()
        .map(|c| {
            let mut g = rng(seed.wrapping_add(c as u64));
            let a = random_block_field(grid, blocks.clone(), 2, &mut g);
            let b = random_block_field(grid, blocks.clone(), 2, &mut g);
            let u = FieldTrajectory::uniform(horizon, 32, |t| ops.semigroup(&a, t))?;
            let v = FieldTrajectory::uniform(horizon, 32, |t| ops.semigroup(&b, t))?;
            verify_duhamel_bilinear(&u, &v, params, r, &partition).map(|r| r.value())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BatchReport { name: "duhamel", ratios })
}

/// Random two-block trajectories `a(t)φ_j + b(t)φ_k` with positive random time profiles.
pub fn interpolation_batch(
    grid: GridSpec,
    theta: f64,
    r1: Exponent,
    r2: Exponent,
    params: FBNormParams,
    alpha: f64,
    cases: usize,
    seed: u64,
) -> Result<BatchReport> {
    let partition = build_partition(&grid)?;
    let blocks = bump_range(&grid, &partition);
    let ratios = (0..cases)
        .into_par_iter()
        .map(|c| {
            let mut g = rng(seed.wrapping_add(c as u64));
            let u = random_block_field(grid, blocks.clone(), 1, &mut g);
            let v = random_block_field(grid, blocks.clone(), 1, &mut g);
            let (ka, kb): (f64, f64) = (rand::Rng::gen_range(&mut g, 0.0..5.0), rand::Rng::gen_range(&mut g, 0.0..5.0));
            let traj = FieldTrajectory::uniform(1.0, 40, |t| {
                let mut w = u.scaled((-ka * t).exp());
                w.axpy((kb * t).sin() + 1.1, &v);
                w
            })?;
            let rec = traj.record(params.p, &partition);
            verify_interpolation(&rec, theta, r1, r2, params, alpha).map(|r| r.value())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BatchReport { name: "interpolation", ratios })
}

/// Fits `C` from the a priori, bilinear and Picard-space batches on `grid` over `[0, horizon]`.
pub fn fit_model_constant(
    grid: GridSpec,
    params: &ModelParams,
    horizon: f64,
    cases: usize,
    seed: u64,
) -> Result<(f64, Vec<BatchReport>)> {
    let reports = vec![
        apriori_batch(grid, params, horizon, cases, seed)?,
        bilinear_batch(grid, grid, params, cases, seed.wrapping_add(1))?,
        duhamel_batch(grid, params, horizon, Exponent::TWO, cases, seed.wrapping_add(2))?,
    ];
    let all: Vec<f64> = reports.iter().flat_map(|r| r.ratios.iter().copied()).collect();
    Ok((fit_global_constant(&all)?, reports))
}
