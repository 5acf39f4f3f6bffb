//! n-dimensional complex FFT over a [`GridSpec`] layout, backed by `rustfft`.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::grid::GridSpec;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(len: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft(len, direction))
}

/// Unnormalized in-place transform along every axis.
pub(crate) fn transform(grid: &GridSpec, data: &mut [Complex64], direction: FftDirection) {
    let n = grid.points();
    let dim = grid.dim();
    debug_assert_eq!(data.len(), grid.len());
    let fft = plan(n, direction);
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];

    // Last axis is contiguous.
    fft.process_with_scratch(data, &mut scratch);

    let mut line = vec![Complex64::default(); n];
    for axis in 0..dim.saturating_sub(1) {
        let stride = n.pow((dim - 1 - axis) as u32);
        let block = stride * n;
        for base in (0..data.len()).step_by(block) {
            for offset in 0..stride {
                let start = base + offset;
                for (m, v) in line.iter_mut().enumerate() {
                    *v = data[start + m * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (m, v) in line.iter().enumerate() {
                    data[start + m * stride] = *v;
                }
            }
        }
    }
}

/// `(-1)^{Σ k_i}`, the phase that moves the sample origin from `x = -L` to `x = 0`.
pub(crate) fn parity_sign(grid: &GridSpec, flat: usize) -> f64 {
    let idx = grid.unravel(flat);
    if idx[..grid.dim()].iter().sum::<usize>() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Samples (complex) → continuous-FT-normalized coefficients.
pub(crate) fn forward_complex(grid: &GridSpec, mut data: Vec<Complex64>) -> Vec<Complex64> {
    transform(grid, &mut data, FftDirection::Forward);
    let h = grid.dx().powi(grid.dim() as i32);
    for (f, c) in data.iter_mut().enumerate() {
        *c *= h * parity_sign(grid, f);
    }
    data
}

/// Continuous-FT-normalized coefficients → samples (complex).
pub(crate) fn inverse_complex(grid: &GridSpec, coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut data: Vec<Complex64> = coeffs
        .iter()
        .enumerate()
        .map(|(f, c)| c * parity_sign(grid, f))
        .collect();
    transform(grid, &mut data, FftDirection::Inverse);
    let scale = 1.0 / grid.volume();
    for v in data.iter_mut() {
        *v *= scale;
    }
    data
}
