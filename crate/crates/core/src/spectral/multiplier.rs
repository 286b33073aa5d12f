use num_complex::Complex64;

use super::{GridSpec, SpectralField};
use crate::error::{Error, Result};

/// Relative slack on the cutoff test `|k|^3 tau <= 1`, so that decimal step
/// sizes such as `1e-3` keep their exact integer cutoff.
const CUTOFF_SLACK: f64 = 1e-12;

/// A diagonal Fourier operator `(Mu)^(k) = symbol(k) û(k)`.
///
/// Symbols are stored for `k = 0..=N/2`; negative modes use
/// `symbol(-k) = conj(symbol(k))`, so a multiplier always maps real fields
/// to real fields. On the self-conjugate modes `0` and `-N/2` only the real
/// part of the symbol acts, which is exactly the action of the operator on
/// grid-sampled data.
#[derive(Debug, Clone, PartialEq)]
pub struct Multiplier {
    grid: GridSpec,
    name: String,
    symbols: Vec<Complex64>,
    identity: bool,
}

impl Multiplier {
    pub fn from_symbol(
        grid: GridSpec,
        name: impl Into<String>,
        symbol: impl Fn(i64) -> Complex64,
    ) -> Self {
        let h = grid.nyquist();
        let mut symbols: Vec<Complex64> = (0..h).map(|k| symbol(k as i64)).collect();
        symbols.push(Complex64::new(symbol(-(h as i64)).re, 0.0));
        symbols[0].im = 0.0;
        Self {
            grid,
            name: name.into(),
            symbols,
            identity: false,
        }
    }

    pub fn identity(grid: GridSpec) -> Self {
        Self {
            grid,
            name: "identity".into(),
            symbols: vec![Complex64::new(1.0, 0.0); grid.half_len()],
            identity: true,
        }
    }

    /// `e^{-t ∂_x^3}`, symbol `e^{i t k^3}`.
    pub fn free_flow(t: f64, grid: GridSpec) -> Self {
        Self::from_symbol(grid, format!("exp(-{t}*dx^3)"), |k| {
            let k3 = (k * k * k) as f64;
            Complex64::from_polar(1.0, t * k3)
        })
    }

    /// `∂_x`, symbol `ik`.
    pub fn dx(grid: GridSpec) -> Self {
        Self::from_symbol(grid, "dx", |k| Complex64::new(0.0, k as f64))
    }

    /// `∂_x^{-1}` on mean-zero fields, symbol `1/(ik)` and `0` at `k = 0`.
    pub fn dx_inv(grid: GridSpec) -> Self {
        Self::from_symbol(grid, "dx^-1", |k| {
            if k == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, -1.0 / k as f64)
            }
        })
    }

    /// The sharp filter keeping `|k| <= cutoff`.
    pub fn band_limit(grid: GridSpec, cutoff: usize) -> Self {
        Self::from_symbol(grid, format!("band<={cutoff}"), |k| {
            Complex64::new(if k.unsigned_abs() as usize <= cutoff { 1.0 } else { 0.0 }, 0.0)
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn is_identity(&self) -> bool {
        self.identity
    }

    /// Symbol at `k` in the index set `-N/2 ..= N/2 - 1`.
    pub fn symbol(&self, k: i64) -> Complex64 {
        let h = self.grid.nyquist() as i64;
        assert!((-h..h).contains(&k), "wavenumber {k} outside the grid");
        if k == -h {
            self.symbols[h as usize]
        } else if k >= 0 {
            self.symbols[k as usize]
        } else {
            self.symbols[(-k) as usize].conj()
        }
    }

    /// Composition `self ∘ other` (diagonal, so order does not matter).
    pub fn then(&self, other: &Multiplier) -> Multiplier {
        assert_eq!(self.grid, other.grid, "grid mismatch in composition");
        if self.identity {
            return other.clone();
        }
        if other.identity {
            return self.clone();
        }
        Multiplier {
            grid: self.grid,
            name: format!("{}*{}", other.name, self.name),
            symbols: self
                .symbols
                .iter()
                .zip(&other.symbols)
                .map(|(a, b)| a * b)
                .collect(),
            identity: false,
        }
    }

    /// Multiplies every symbol by a real factor.
    pub fn scaled(&self, factor: f64) -> Multiplier {
        Multiplier {
            grid: self.grid,
            name: format!("{factor}*{}", self.name),
            symbols: self.symbols.iter().map(|s| s * factor).collect(),
            identity: false,
        }
    }

    pub fn apply(&self, f: &SpectralField) -> Result<SpectralField> {
        self.grid.check_same(&f.grid)?;
        if self.identity {
            return Ok(f.clone());
        }
        let coeffs = self
            .symbols
            .iter()
            .zip(&f.coeffs)
            .map(|(s, c)| s * c)
            .collect();
        Ok(SpectralField::from_raw(f.grid, coeffs))
    }
}

/// Largest integer `K` with `K tau^{1/3} <= 1`, i.e. the filter keeps `|k| <= K`.
pub fn pi_cutoff(tau: f64) -> usize {
    assert!(tau > 0.0 && tau.is_finite(), "tau must be positive, got {tau}");
    let keeps = |k: usize| {
        let k = k as f64;
        k * k * k * tau <= 1.0 + CUTOFF_SLACK
    };
    let mut k = tau.powf(-1.0 / 3.0).floor() as usize;
    while k > 0 && !keeps(k) {
        k -= 1;
    }
    while keeps(k + 1) {
        k += 1;
    }
    k
}

/// The filter `Π_τ = χ(-i ∂_x τ^{1/3})` with `χ` the indicator of `[-1, 1]`.
pub fn make_pi_tau(tau: f64, grid: GridSpec) -> Result<Multiplier> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "tau",
            reason: format!("must be positive and finite, got {tau}"),
        });
    }
    let mut m = Multiplier::band_limit(grid, pi_cutoff(tau));
    m.name = format!("pi_tau({tau})");
    Ok(m)
}

pub fn apply_multiplier(m: &Multiplier, f: &SpectralField) -> Result<SpectralField> {
    m.apply(f)
}

pub fn dx(f: &SpectralField) -> SpectralField {
    Multiplier::dx(f.grid)
        .apply(f)
        .expect("multiplier built on the field's grid")
}

/// `∂_x^{-1}`; rejects fields whose zero mode exceeds [`super::MEAN_ZERO_TOL`].
pub fn dx_inv(f: &SpectralField) -> Result<SpectralField> {
    f.ensure_mean_zero()?;
    Multiplier::dx_inv(f.grid).apply(f)
}

/// `e^{-t ∂_x^3} f`.
pub fn free_flow(t: f64, f: &SpectralField) -> SpectralField {
    Multiplier::free_flow(t, f.grid)
        .apply(f)
        .expect("multiplier built on the field's grid")
}

#[cfg(test)]
mod tests {
    use super::super::test_support::random_field;
    use super::super::{to_physical, to_spectral};
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn grid(n: usize) -> GridSpec {
        GridSpec::new(n).unwrap()
    }

    fn samples(g: GridSpec, f: impl Fn(f64) -> f64) -> SpectralField {
        to_spectral(g, &g.points().into_iter().map(f).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn free_flow_rotates_cosine() {
        let g = grid(32);
        let u = samples(g, f64::cos);
        let m = Multiplier::from_symbol(g, "phase", |k| {
            Complex64::from_polar(1.0, 0.1 * (k * k * k) as f64)
        });
        let out = to_physical(&m.apply(&u).unwrap());
        for (v, x) in out.iter().zip(g.points()) {
            assert_abs_diff_eq!(*v, (x + 0.1).cos(), epsilon = 1e-14);
        }
    }

    #[test]
    fn identity_is_bit_exact() {
        let g = grid(64);
        let mut f = random_field(g, 31, 3);
        // include signed zeros, which plain complex multiplication would flip
        let mut modes = f.clone().into_modes();
        modes[5] = Complex64::new(-0.0, 0.25);
        modes[6] = Complex64::new(0.5, -0.0);
        f = SpectralField::from_modes(g, modes).unwrap();
        let out = Multiplier::identity(g).apply(&f).unwrap();
        for (a, b) in out.modes().iter().zip(f.modes()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn derivative_of_cosine() {
        let g = grid(32);
        let out = to_physical(&dx(&samples(g, f64::cos)));
        for (v, x) in out.iter().zip(g.points()) {
            assert_abs_diff_eq!(*v, -x.sin(), epsilon = 1e-14);
        }
    }

    #[test]
    fn grid_mismatch_rejected() {
        let m = Multiplier::dx(grid(16));
        assert_eq!(
            m.apply(&SpectralField::zeros(grid(32))),
            Err(Error::GridMismatch { left: 16, right: 32 })
        );
    }

    #[test]
    fn pi_tau_cutoffs() {
        assert_eq!(pi_cutoff(1e-3), 10);
        assert_eq!(pi_cutoff(1.0), 1);
        assert_eq!(pi_cutoff(1.0 / 64.0), 4);
        assert_eq!(pi_cutoff(2f64.powi(-9)), 8);
        assert_eq!(pi_cutoff(2f64.powi(-13)), 20);
        assert_eq!(pi_cutoff(1e-2), 4);
        assert_eq!(pi_cutoff(1.5), 0);
        let g = grid(64);
        let pi = make_pi_tau(1e-3, g).unwrap();
        for k in g.wavenumbers() {
            let expected = if k.abs() <= 10 { 1.0 } else { 0.0 };
            assert_eq!(pi.symbol(k).re, expected, "k={k}");
        }
        let pi = make_pi_tau(1.0, g).unwrap();
        assert_eq!(pi.symbol(1).re, 1.0);
        assert_eq!(pi.symbol(-1).re, 1.0);
        assert_eq!(pi.symbol(2).re, 0.0);
        assert!(make_pi_tau(0.0, g).is_err());
    }

    #[test]
    fn dx_inv_examples() {
        let g = grid(32);
        let out = to_physical(&dx_inv(&samples(g, f64::cos)).unwrap());
        for (v, x) in out.iter().zip(g.points()) {
            assert_abs_diff_eq!(*v, x.sin(), epsilon = 1e-14);
        }
        let out = to_physical(&dx_inv(&samples(g, |x| (2.0 * x).sin())).unwrap());
        for (v, x) in out.iter().zip(g.points()) {
            assert_abs_diff_eq!(*v, -(2.0 * x).cos() / 2.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn dx_inv_rejects_nonzero_mean() {
        let g = grid(16);
        let f = samples(g, |x| 1e-6 + x.cos());
        assert!(matches!(dx_inv(&f), Err(Error::MeanNotZero { .. })));
    }

    proptest! {
        #[test]
        fn pi_tau_is_idempotent(seed in 0u64..1000, exp in 1i32..15) {
            let g = grid(128);
            let f = random_field(g, 63, seed);
            let pi = make_pi_tau(2f64.powi(-exp), g).unwrap();
            let once = pi.apply(&f).unwrap();
            let twice = pi.apply(&once).unwrap();
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn dx_and_dx_inv_round_trip(seed in 0u64..1000) {
            let g = grid(256);
            let f = random_field(g, 127, seed);
            let back = dx(&dx_inv(&f).unwrap());
            prop_assert!((&back - &f).l2_norm() <= 1e-13 * f.l2_norm());
            let back = dx_inv(&dx(&f)).unwrap();
            prop_assert!((&back - &f).l2_norm() <= 1e-13 * f.l2_norm());
        }

        #[test]
        fn real_symmetric_symbols_keep_fields_real(seed in 0u64..1000, t in 0.0f64..1.0) {
            // symmetry is structural; the physical samples must round-trip to the same modes
            let g = grid(64);
            let f = random_field(g, 31, seed);
            let out = Multiplier::free_flow(t, g).apply(&f).unwrap();
            let back = to_spectral(g, &to_physical(&out)).unwrap();
            prop_assert!((&back - &out).l2_norm() <= 1e-13 * out.l2_norm());
            prop_assert_eq!(out.modes()[0].im, 0.0);
        }
    }
}
