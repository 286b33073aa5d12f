//! Fourier representation of mean-zero real fields on the torus `[0, 2 pi)`.
//!
//! Coefficients follow `u(x) = sum_k û(k) e^{ikx}` with
//! `û(k) = (1/2 pi) ∫ u(x) e^{-ikx} dx`, over the index set
//! `k ∈ {-N/2, ..., N/2 - 1}`. Only `k = 0..=N/2` is stored; negative modes
//! are implied by conjugate symmetry, so every field is real by construction.
//! The stored entry `N/2` is the (real) Nyquist mode `k = -N/2`.

mod fft;
mod multiplier;
mod product;

use std::f64::consts::PI;
use std::ops::{Add, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use multiplier::{apply_multiplier, dx, dx_inv, free_flow, make_pi_tau, pi_cutoff, Multiplier};
pub(crate) use product::padded_samples;
pub use product::{product_dealiased, square_dealiased};

pub(crate) use fft::fast_len;

/// Tolerance on `|û(0)|` for operations that require mean-zero input.
pub const MEAN_ZERO_TOL: f64 = 1e-12;

/// Spatial resolution: `n_modes` grid points / retained modes on `[0, 2 pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridSpec {
    n_modes: usize,
}

impl GridSpec {
    pub fn new(n_modes: usize) -> Result<Self> {
        if n_modes < 8 || n_modes % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "n_modes must be even and >= 8, got {n_modes}"
            )));
        }
        Ok(Self { n_modes })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    /// Index of the Nyquist entry in the stored half spectrum.
    pub fn nyquist(&self) -> usize {
        self.n_modes / 2
    }

    pub(crate) fn half_len(&self) -> usize {
        self.n_modes / 2 + 1
    }

    /// The symmetric wavenumber range `-N/2 ..= N/2 - 1`.
    pub fn wavenumbers(&self) -> impl Iterator<Item = i64> {
        let h = (self.n_modes / 2) as i64;
        -h..h
    }

    /// Grid points `x_j = 2 pi j / N`.
    pub fn points(&self) -> Vec<f64> {
        let n = self.n_modes as f64;
        (0..self.n_modes).map(|j| 2.0 * PI * j as f64 / n).collect()
    }

    pub(crate) fn check_same(&self, other: &GridSpec) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch {
                left: self.n_modes,
                right: other.n_modes,
            });
        }
        Ok(())
    }
}

/// Japanese bracket `<x> = (1 + x^2)^{1/2}`.
#[inline]
pub fn bracket(x: f64) -> f64 {
    (1.0 + x * x).sqrt()
}

/// A real field stored through its Fourier coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.half_len()],
        }
    }

    /// Builds a field from the half spectrum `k = 0..=N/2`.
    ///
    /// Entries `0` and `N/2` are self-conjugate and must be real.
    pub fn from_modes(grid: GridSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.half_len() {
            return Err(Error::LengthMismatch {
                expected: grid.half_len(),
                got: coeffs.len(),
            });
        }
        for idx in [0, grid.nyquist()] {
            if coeffs[idx].im != 0.0 {
                return Err(Error::InvalidParameter {
                    name: "coeffs",
                    reason: format!("self-conjugate mode {idx} has nonzero imaginary part"),
                });
            }
        }
        Ok(Self { grid, coeffs })
    }

    /// Builds a field from `k -> û(k)` evaluated on `k = 0..=N/2`.
    pub fn from_fn(grid: GridSpec, mut f: impl FnMut(usize) -> Complex64) -> Result<Self> {
        Self::from_modes(grid, (0..grid.half_len()).map(&mut f).collect())
    }

    pub(crate) fn from_raw(grid: GridSpec, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), grid.half_len());
        Self { grid, coeffs }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    /// Stored half spectrum, `k = 0..=N/2`.
    pub fn modes(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_modes(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// `û(k)` for `k` in the index set `-N/2 ..= N/2 - 1`; zero outside it.
    pub fn coeff(&self, k: i64) -> Complex64 {
        let h = self.grid.nyquist() as i64;
        if k == -h {
            self.coeffs[h as usize]
        } else if k >= 0 && k < h {
            self.coeffs[k as usize]
        } else if k < 0 && k > -h {
            self.coeffs[(-k) as usize].conj()
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    /// The zero mode, i.e. the spatial mean.
    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    /// Largest `|k|` carrying a nonzero coefficient (0 for constant or zero fields).
    pub fn bandwidth(&self) -> usize {
        self.coeffs
            .iter()
            .rposition(|c| c.re != 0.0 || c.im != 0.0)
            .unwrap_or(0)
    }

    /// The same field on another grid: modes `|k| < min(N, N')/2` are copied,
    /// everything else is dropped or zero. Exact when the bandwidth is below both Nyquists.
    pub fn resized(&self, grid: GridSpec) -> SpectralField {
        let keep = self.grid.nyquist().min(grid.nyquist());
        let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.half_len()];
        coeffs[..keep].copy_from_slice(&self.coeffs[..keep]);
        SpectralField::from_raw(grid, coeffs)
    }

    pub(crate) fn ensure_mean_zero(&self) -> Result<()> {
        let value = self.coeffs[0].norm();
        if value > MEAN_ZERO_TOL {
            return Err(Error::MeanNotZero { value });
        }
        Ok(())
    }

    /// Sum over the index set of `weight(|k|) |û(k)|^2`.
    pub(crate) fn weighted_energy(&self, weight: impl Fn(f64) -> f64) -> f64 {
        let h = self.grid.nyquist();
        let mut acc = weight(0.0) * self.coeffs[0].norm_sqr();
        for k in 1..h {
            acc += 2.0 * weight(k as f64) * self.coeffs[k].norm_sqr();
        }
        acc + weight(h as f64) * self.coeffs[h].norm_sqr()
    }

    pub fn l2_norm(&self) -> f64 {
        sobolev_norm(self, 0.0)
    }

    pub fn sobolev_norm(&self, s: f64) -> f64 {
        sobolev_norm(self, s)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::from_raw(self.grid, self.coeffs.iter().map(|c| c * factor).collect())
    }

    /// `L^2` distance between two fields on the same grid.
    pub fn distance(&self, other: &SpectralField) -> Result<f64> {
        self.grid.check_same(&other.grid)?;
        Ok((self - other).l2_norm())
    }

    pub fn to_physical(&self) -> Vec<f64> {
        to_physical(self)
    }
}

impl Add for &SpectralField {
    type Output = SpectralField;

    /// Panics on grid mismatch.
    fn add(self, rhs: &SpectralField) -> SpectralField {
        assert_eq!(self.grid, rhs.grid, "grid mismatch in field addition");
        SpectralField::from_raw(
            self.grid,
            self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        )
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;

    /// Panics on grid mismatch.
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        assert_eq!(self.grid, rhs.grid, "grid mismatch in field subtraction");
        SpectralField::from_raw(
            self.grid,
            self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        )
    }
}

/// Samples `u(x_j)` at `x_j = 2 pi j / N`.
pub fn to_physical(f: &SpectralField) -> Vec<f64> {
    fft::inverse(&f.coeffs, f.grid.n_modes)
}

/// Fourier coefficients of grid samples. The zero mode is kept as computed.
pub fn to_spectral(grid: GridSpec, samples: &[f64]) -> Result<SpectralField> {
    if samples.len() != grid.n_modes {
        return Err(Error::LengthMismatch {
            expected: grid.n_modes,
            got: samples.len(),
        });
    }
    let scale = 1.0 / grid.n_modes as f64;
    let mut coeffs = fft::forward(samples);
    for c in coeffs.iter_mut() {
        *c *= scale;
    }
    let h = grid.nyquist();
    coeffs[0].im = 0.0;
    coeffs[h].im = 0.0;
    Ok(SpectralField::from_raw(grid, coeffs))
}

/// `(2 pi sum_k <k>^{2s} |û(k)|^2)^{1/2}`.
pub fn sobolev_norm(f: &SpectralField, s: f64) -> f64 {
    let energy = if s == 0.0 {
        f.weighted_energy(|_| 1.0)
    } else {
        f.weighted_energy(|k| (1.0 + k * k).powf(s))
    };
    (2.0 * PI * energy).sqrt()
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;
    use rand_chacha::rand_core::{RngCore, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub fn uniform(rng: &mut ChaCha8Rng) -> f64 {
        (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Random mean-zero field with modes `1..=band`, Nyquist zero.
    pub fn random_field(grid: GridSpec, band: usize, seed: u64) -> SpectralField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let band = band.min(grid.nyquist() - 1);
        SpectralField::from_fn(grid, |k| {
            if k == 0 || k > band {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(uniform(&mut rng) - 0.5, uniform(&mut rng) - 0.5)
            }
        })
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::test_support::random_field;
    use super::*;
    use approx::assert_abs_diff_eq;

    fn grid(n: usize) -> GridSpec {
        GridSpec::new(n).unwrap()
    }

    fn cosine(g: GridSpec) -> SpectralField {
        SpectralField::from_fn(g, |k| {
            if k == 1 {
                Complex64::new(0.5, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .unwrap()
    }

    #[test]
    fn resize_round_trip() {
        let big = GridSpec::new(64).unwrap();
        let small = GridSpec::new(16).unwrap();
        let f = random_field(big, 7, 5);
        let g = f.resized(small);
        assert_eq!(g.resized(big), f);
        assert!((g.l2_norm() - f.l2_norm()).abs() < 1e-15);
        assert_eq!(random_field(big, 20, 5).resized(small).bandwidth(), 7);
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(6).is_err());
        assert!(GridSpec::new(9).is_err());
        assert!(GridSpec::new(8).is_ok());
        let ks: Vec<i64> = grid(8).wavenumbers().collect();
        assert_eq!(ks, vec![-4, -3, -2, -1, 0, 1, 2, 3]);
    }

    #[test]
    fn zero_field_has_zero_samples() {
        assert!(to_physical(&SpectralField::zeros(grid(16)))
            .iter()
            .all(|&x| x == 0.0));
    }

    #[test]
    fn single_mode_is_cosine() {
        let g = grid(32);
        let xs = g.points();
        for (u, x) in to_physical(&cosine(g)).iter().zip(&xs) {
            assert_abs_diff_eq!(*u, x.cos(), epsilon = 1e-15);
        }
    }

    #[test]
    fn spectral_coefficients_of_simple_samples() {
        let g = grid(32);
        let xs = g.points();
        let c = to_spectral(g, &xs.iter().map(|x| x.cos()).collect::<Vec<_>>()).unwrap();
        for k in g.wavenumbers() {
            let expected = if k.abs() == 1 { 0.5 } else { 0.0 };
            assert_abs_diff_eq!(c.coeff(k).re, expected, epsilon = 1e-14);
            assert_abs_diff_eq!(c.coeff(k).im, 0.0, epsilon = 1e-14);
        }

        let s = to_spectral(g, &xs.iter().map(|x| (2.0 * x).sin()).collect::<Vec<_>>()).unwrap();
        assert_abs_diff_eq!(s.coeff(2).im, -0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(s.coeff(-2).im, 0.5, epsilon = 1e-14);

        let c = to_spectral(g, &[2.5; 32]).unwrap();
        assert_abs_diff_eq!(c.mean(), 2.5, epsilon = 1e-15);
    }

    #[test]
    fn length_mismatch_rejected() {
        assert_eq!(
            to_spectral(grid(16), &[0.0; 15]),
            Err(Error::LengthMismatch { expected: 16, got: 15 })
        );
    }

    #[test]
    fn round_trip_on_random_fields() {
        for n in [64, 256, 1024] {
            let g = grid(n);
            for seed in 0..40 {
                let f = random_field(g, n / 2 - 1, seed);
                let back = to_spectral(g, &to_physical(&f)).unwrap();
                let rel = (&back - &f).l2_norm() / f.l2_norm();
                assert!(rel <= 1e-13, "n={n} seed={seed} rel={rel:e}");
            }
        }
    }

    #[test]
    fn sobolev_norm_of_cosine() {
        let f = cosine(grid(16));
        assert_abs_diff_eq!(sobolev_norm(&f, 0.0), PI.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(sobolev_norm(&f, 1.0), PI.sqrt() * 2f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn l2_norm_matches_trapezoid_quadrature() {
        let g = grid(128);
        for seed in 0..10 {
            let f = random_field(g, 63, seed);
            let samples = to_physical(&f);
            let quad: f64 = samples.iter().map(|u| u * u).sum::<f64>() * 2.0 * PI / 128.0;
            assert!((sobolev_norm(&f, 0.0) - quad.sqrt()).abs() <= 1e-10);
        }
    }

    #[test]
    fn coeff_follows_index_set() {
        let g = grid(8);
        let f = SpectralField::from_modes(
            g,
            vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 2.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(3.0, 0.0),
            ],
        )
        .unwrap();
        assert_eq!(f.coeff(-1), Complex64::new(1.0, -2.0));
        assert_eq!(f.coeff(-4), Complex64::new(3.0, 0.0));
        assert_eq!(f.coeff(4), Complex64::new(0.0, 0.0));
        assert_eq!(f.bandwidth(), 4);
    }

    #[test]
    fn self_conjugate_modes_must_be_real() {
        let g = grid(8);
        let mut modes = vec![Complex64::new(0.0, 0.0); 5];
        modes[0] = Complex64::new(0.0, 1.0);
        assert!(SpectralField::from_modes(g, modes).is_err());
    }
}
