//! Shared fixtures for the kernel benchmarks.

use fbpme::testfields::{random_block_field, rng};
use fbpme::{build_partition, GridSpec, SpectralField};

/// Grid with `dxi = 3/4` so the dyadic band starts at block 0.
pub fn grid(dim: usize, points: usize) -> GridSpec {
    GridSpec::new(dim, points, 4.0 * std::f64::consts::PI / 3.0).expect("valid benchmark grid")
}

/// Reproducible multi-block field on `grid`.
pub fn field(grid: GridSpec, seed: u64) -> SpectralField {
    let part = build_partition(&grid).expect("benchmark grid resolves three blocks");
    random_block_field(grid, part.j_min()..=part.j_max(), 4, &mut rng(seed))
}
