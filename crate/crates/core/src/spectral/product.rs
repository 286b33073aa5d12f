//! Alias-free quadratic products.
//!
//! The padded transform length adapts to the actual bandwidths of the
//! factors: with bandwidths `a` and `b` it is at least
//! `min(2(a+b)+1, a+b+N/2)`, so every retained mode `|k| < N/2` is exact.
//! For full-band inputs this is the classical 3/2 rule; for inputs that a
//! filter has cut down to a few modes the transforms stay small.

use num_complex::Complex64;

use super::{fast_len, fft, GridSpec, SpectralField};
use crate::error::Result;

fn padded_len(grid: GridSpec, a: usize, b: usize) -> usize {
    let h = grid.nyquist();
    let need = (2 * (a + b) + 1).min(a + b + h).max(2 * a.max(b) + 1);
    fast_len(need)
}

/// Samples of `f` on a grid of `m` points, treating the Nyquist entry as `c cos(N x / 2)`.
pub(crate) fn padded_samples(f: &SpectralField, m: usize) -> Vec<f64> {
    let h = f.grid.nyquist();
    let band = f.bandwidth();
    let mut half = vec![Complex64::new(0.0, 0.0); m / 2 + 1];
    for k in 0..=band.min(h - 1) {
        half[k] = f.coeffs[k];
    }
    if band == h {
        half[h] = f.coeffs[h] * 0.5;
    }
    fft::inverse(&half, m)
}

fn truncate(grid: GridSpec, pointwise: &[f64]) -> SpectralField {
    let m = pointwise.len();
    let h = grid.nyquist();
    let spectrum = fft::forward(pointwise);
    let scale = 1.0 / m as f64;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.half_len()];
    for k in 0..h.min(m / 2) {
        coeffs[k] = spectrum[k] * scale;
    }
    coeffs[0].im = 0.0;
    SpectralField::from_raw(grid, coeffs)
}

/// Exact Fourier coefficients of `f g` on `|k| < N/2`; the Nyquist entry is zero.
pub fn product_dealiased(f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
    f.grid.check_same(&g.grid)?;
    if f.is_zero() || g.is_zero() {
        return Ok(SpectralField::zeros(f.grid));
    }
    let m = padded_len(f.grid, f.bandwidth(), g.bandwidth());
    let mut a = padded_samples(f, m);
    let b = padded_samples(g, m);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y;
    }
    Ok(truncate(f.grid, &a))
}

/// `product_dealiased(f, f)` with one transform fewer.
pub fn square_dealiased(f: &SpectralField) -> SpectralField {
    if f.is_zero() {
        return SpectralField::zeros(f.grid);
    }
    let band = f.bandwidth();
    let m = padded_len(f.grid, band, band);
    let mut a = padded_samples(f, m);
    for x in a.iter_mut() {
        *x *= *x;
    }
    truncate(f.grid, &a)
}
