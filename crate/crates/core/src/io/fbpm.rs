use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::spectral::SpectralField;

pub const FBPM_MAGIC: &[u8; 4] = b"FBPM";
pub const FBPM_VERSION: u32 = 1;

/// Header, then `N^n` little-endian `(re, im)` pairs in storage order.
pub fn write_fbpm(u: &SpectralField, mut w: impl Write) -> Result<()> {
    let g = u.grid;
    let mut buf = Vec::with_capacity(24 + 16 * u.coeffs.len());
    buf.extend_from_slice(FBPM_MAGIC);
    buf.extend_from_slice(&FBPM_VERSION.to_le_bytes());
    buf.extend_from_slice(&(g.dim() as u32).to_le_bytes());
    buf.extend_from_slice(&(g.points() as u32).to_le_bytes());
    buf.extend_from_slice(&g.half_period().to_le_bytes());
    for c in &u.coeffs {
        buf.extend_from_slice(&c.re.to_le_bytes());
        buf.extend_from_slice(&c.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_fbpm(mut r: impl Read) -> Result<SpectralField> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() < 24 {
        return Err(Error::Format(format!("FBPM header truncated: {} bytes", bytes.len())));
    }
    if &bytes[..4] != FBPM_MAGIC {
        return Err(Error::Format("bad magic, not an FBPM file".into()));
    }
    let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().expect("4 bytes"));
    let version = word(4);
    if version != FBPM_VERSION {
        return Err(Error::Format(format!("unsupported FBPM version {version}")));
    }
    let (dim, points) = (word(8) as usize, word(12) as usize);
    let half_period = f64::from_le_bytes(bytes[16..24].try_into().expect("8 bytes"));
    let grid = GridSpec::new(dim, points, half_period).map_err(|e| Error::Format(format!("FBPM header: {e}")))?;
    let body = &bytes[24..];
    if body.len() != 16 * grid.len() {
        return Err(Error::Format(format!(
            "FBPM body holds {} bytes, expected {} for {} coefficients",
            body.len(),
            16 * grid.len(),
            grid.len()
        )));
    }
    let coeffs = body
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().expect("8 bytes")),
                f64::from_le_bytes(c[8..].try_into().expect("8 bytes")),
            )
        })
        .collect();
    SpectralField::new(grid, coeffs)
}

pub fn write_fbpm_file(u: &SpectralField, path: &Path) -> Result<()> {
    write_fbpm(u, std::fs::File::create(path)?)
}

pub fn read_fbpm_file(path: &Path) -> Result<SpectralField> {
    read_fbpm(std::fs::File::open(path)?)
}
