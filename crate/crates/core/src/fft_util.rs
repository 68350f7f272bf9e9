//! Thin wrappers around `rustfft` for the 1D and 2D transforms used here.
//!
//! `rustfft` is unnormalized in both directions; callers divide by the
//! transform length after an inverse.

use num_complex::Complex64;
use rustfft::FftPlanner;

pub(crate) fn fft_1d(buf: &mut [Complex64]) {
    let fft = FftPlanner::new().plan_fft_forward(buf.len());
    fft.process(buf);
}

pub(crate) fn ifft_1d(buf: &mut [Complex64]) {
    let fft = FftPlanner::new().plan_fft_inverse(buf.len());
    fft.process(buf);
}

/// In-place 2D FFT of a row-major `rows x cols` buffer: rows first, then
/// columns via transpose.
pub(crate) fn fft_2d(rows: usize, cols: usize, buf: &mut [Complex64], inverse: bool) {
    assert_eq!(buf.len(), rows * cols);
    let mut planner = FftPlanner::new();
    let plan = |n: usize, planner: &mut FftPlanner<f64>| {
        if inverse {
            planner.plan_fft_inverse(n)
        } else {
            planner.plan_fft_forward(n)
        }
    };

    let row_fft = plan(cols, &mut planner);
    for row in buf.chunks_exact_mut(cols) {
        row_fft.process(row);
    }

    let mut transposed = transpose(rows, cols, buf);
    let col_fft = plan(rows, &mut planner);
    for col in transposed.chunks_exact_mut(rows) {
        col_fft.process(col);
    }
    // Transpose back so the buffer stays rows x cols.
    let back = transpose(cols, rows, &transposed);
    buf.copy_from_slice(&back);
}

fn transpose(rows: usize, cols: usize, m: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); m.len()];
    for r in 0..rows {
        for c in 0..cols {
            out[c * rows + r] = m[r * cols + c];
        }
    }
    out
}
