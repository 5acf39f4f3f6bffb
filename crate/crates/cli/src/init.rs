use std::path::Path;

use anyhow::{bail, Context, Result};

use fbpme::io::read_fbpm_file;
use fbpme::testfields::{block_bump, gaussian, rng};
use fbpme::{build_partition, GridSpec, SpectralField};

use crate::config::{resolve, InitialConfig, InitialKind};

pub fn initial_field(cfg: &InitialConfig, grid: GridSpec, base: &Path) -> Result<SpectralField> {
    match cfg.kind {
        InitialKind::Gaussian => {
            let width = cfg.width.context("initial_data.width is required for gaussian")?;
            Ok(gaussian(grid, cfg.amplitude, width)?)
        }
        InitialKind::BlockBump => {
            let partition = build_partition(&grid)?;
            let j = cfg.block.unwrap_or(partition.j_min() + 1);
            if !partition.j_range().contains(&j) {
                bail!("initial_data.block {j} is outside the resolved blocks {:?}", partition.j_range());
            }
            Ok(block_bump(grid, j, cfg.amplitude, &mut rng(cfg.seed)))
        }
        InitialKind::File => {
            let path = resolve(base, cfg.path.as_ref().context("initial_data.path is required for file")?);
            let u = read_fbpm_file(&path).with_context(|| format!("reading {}", path.display()))?;
            if u.grid != grid {
                bail!(
                    "{} holds an (n={}, N={}, L={}) field but the config grid is (n={}, N={}, L={})",
                    path.display(),
                    u.grid.dim(),
                    u.grid.points(),
                    u.grid.half_period(),
                    grid.dim(),
                    grid.points(),
                    grid.half_period()
                );
            }
            Ok(u.scaled(cfg.amplitude))
        }
    }
}
