//! Discrete Bourgain norms of sampled space-time fields.
//!
//! A [`SpaceTimeField`] holds `u^0, ..., u^{M-1}` at spacing `τ`. Its
//! transform `ũ(σ, k) = τ Σ_m û^m(k) e^{imτσ}` is evaluated on the grid
//! `σ_j = -π/τ + 2πj/(Mτ)`, where it is an unnormalized inverse DFT of
//! `(-1)^m û^m(k)`. Integrals over `σ` use the Riemann weight `2π/(Mτ)`,
//! which makes the space-time Parseval identity exact:
//! `Σ_k Σ_j |ũ(σ_j,k)|² 2π/(Mτ) = τ Σ_m ||u^m||²_{L²}`.
//!
//! Sums over `k ∈ ℤ` run over the half spectrum with multiplicity 2 for
//! `0 < k < N/2`. This is exact because `ũ(σ,-k) = conj ũ(-σ,k)`, the σ-grid
//! is symmetric modulo `2π/τ` and `|d_τ(-x)| = |d_τ(x)|`.

mod probe;

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::spectral::{bracket, dx, make_pi_tau, padded_samples, product_dealiased, GridSpec, SpectralField};

pub use probe::{
    uniformity_probe, write_probe_csv, ProbeConfig, ProbeGrowth, ProbeReport, ProbeRow,
    PROBE_CSV_HEADER,
};

/// Fewest time samples a space-time field may have.
pub const MIN_SAMPLES: usize = 8;

/// `d_τ(σ) = (e^{iτσ} - 1)/τ`.
pub fn d_tau(tau: f64, sigma: f64) -> Complex64 {
    d_tau_phase(tau, tau * sigma)
}

/// `d_τ` from the phase `x = τσ`; `e^{ix} - 1 = -2 sin²(x/2) + i sin x`.
fn d_tau_phase(tau: f64, x: f64) -> Complex64 {
    let half = (0.5 * x).sin();
    Complex64::new(-2.0 * half * half, x.sin()) / tau
}

/// `d_τ(σ + k³)` with `τk³` reduced modulo `2π` before adding `τσ`.
pub fn d_tau_shifted(tau: f64, sigma: f64, k: i64) -> Complex64 {
    let k3 = (k * k * k) as f64;
    let shift = (tau * k3).rem_euclid(2.0 * PI);
    d_tau_phase(tau, shift + tau * sigma)
}

/// Raised-cosine window on `m = 0..len`: 1 on the middle half, 0 at both ends.
pub fn window(m: usize, len: usize) -> f64 {
    if len < 2 {
        return 1.0;
    }
    let x = m as f64 / (len - 1) as f64;
    let edge = x.min(1.0 - x);
    if edge >= 0.25 {
        1.0
    } else {
        0.5 * (1.0 - (4.0 * PI * edge).cos())
    }
}

/// Time samples `u^0, ..., u^{M-1}` at spacing `τ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField {
    tau: f64,
    grid: GridSpec,
    samples: Vec<SpectralField>,
}

impl SpaceTimeField {
    pub fn new(tau: f64, samples: Vec<SpectralField>) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "tau",
                reason: format!("must be positive and finite, got {tau}"),
            });
        }
        if samples.len() < MIN_SAMPLES {
            return Err(Error::InvalidParameter {
                name: "samples",
                reason: format!("need at least {MIN_SAMPLES} time samples, got {}", samples.len()),
            });
        }
        let grid = samples[0].grid();
        for s in &samples[1..] {
            grid.check_same(&s.grid())?;
        }
        Ok(Self { tau, grid, samples })
    }

    /// `u^m = η(m) e^{-mτ∂³} f` for `m < len`.
    pub fn windowed_free_flow(f: &SpectralField, tau: f64, len: usize) -> Result<Self> {
        let grid = f.grid();
        let step = crate::spectral::Multiplier::free_flow(tau, grid);
        let mut samples = Vec::with_capacity(len);
        let mut current = f.clone();
        for m in 0..len {
            samples.push(current.scaled(window(m, len)));
            current = step.apply(&current)?;
        }
        Self::new(tau, samples)
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[SpectralField] {
        &self.samples
    }

    /// Applies `f` to every sample.
    pub fn map(&self, f: impl FnMut(&SpectralField) -> Result<SpectralField>) -> Result<Self> {
        let samples = self.samples.iter().map(f).collect::<Result<Vec<_>>>()?;
        Self::new(self.tau, samples)
    }

    /// `||u^n||_{l²_τ L²} = (τ Σ_m ||u^m||²)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        (self.tau * self.samples.iter().map(|u| u.l2_norm().powi(2)).sum::<f64>()).sqrt()
    }

    /// `sup_m ||u^m||_{H^s}`.
    pub fn sup_sobolev(&self, s: f64) -> f64 {
        self.samples
            .iter()
            .map(|u| u.sobolev_norm(s))
            .fold(0.0, f64::max)
    }

    fn ensure_mean_zero(&self) -> Result<()> {
        self.samples.iter().try_for_each(|u| u.ensure_mean_zero())
    }
}

/// `ũ(σ_j, k)` for `j < M` and `k = 0..=N/2` (the last entry is `k = -N/2`).
#[derive(Debug, Clone, PartialEq)]
pub struct StSpectrum {
    tau: f64,
    len: usize,
    grid: GridSpec,
    /// `values[kidx * len + j]`
    values: Vec<Complex64>,
}

impl StSpectrum {
    pub fn sigma(&self, j: usize) -> f64 {
        -PI / self.tau + 2.0 * PI * j as f64 / (self.len as f64 * self.tau)
    }

    /// Riemann weight of one σ-cell.
    pub fn weight(&self) -> f64 {
        2.0 * PI / (self.len as f64 * self.tau)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, j: usize, kidx: usize) -> Complex64 {
        self.values[kidx * self.len + j]
    }

    /// Slice over σ of one half-spectrum index.
    pub fn column(&self, kidx: usize) -> &[Complex64] {
        &self.values[kidx * self.len..(kidx + 1) * self.len]
    }

    /// Signed wavenumber and multiplicity of a half-spectrum index.
    fn mode(&self, kidx: usize) -> (i64, f64) {
        let h = self.grid.nyquist();
        match kidx {
            0 => (0, 1.0),
            k if k == h => (-(h as i64), 1.0),
            k => (k as i64, 2.0),
        }
    }

    /// `Σ_k mult ⟨k⟩^{2s} Σ_j ⟨d_τ(σ_j+k³)⟩^{2b} |ũ|² · w`.
    fn weighted_l2(&self, s: f64, b: f64) -> f64 {
        let w = self.weight();
        let mut acc = 0.0;
        for kidx in 0..self.grid.nyquist() + 1 {
            let (k, mult) = self.mode(kidx);
            let ks = bracket(k as f64).powf(2.0 * s);
            let col = self.column(kidx);
            let mut inner = 0.0;
            for (j, c) in col.iter().enumerate() {
                let n2 = c.norm_sqr();
                if n2 == 0.0 {
                    continue;
                }
                let weight = if b == 0.0 {
                    1.0
                } else {
                    bracket(d_tau_shifted(self.tau, self.sigma(j), k).norm()).powf(2.0 * b)
                };
                inner += weight * n2;
            }
            acc += mult * ks * inner * w;
        }
        acc
    }

    /// `(Σ_k mult (⟨k⟩^s Σ_j ⟨d_τ(σ_j+k³)⟩^{b} |ũ| w)²)^{1/2}`, the `l²(k) L¹(σ)` part.
    fn l2_l1(&self, s: f64, b: f64) -> f64 {
        let w = self.weight();
        let mut acc = 0.0;
        for kidx in 0..self.grid.nyquist() + 1 {
            let (k, mult) = self.mode(kidx);
            let mut l1 = 0.0;
            for (j, c) in self.column(kidx).iter().enumerate() {
                let a = c.norm();
                if a == 0.0 {
                    continue;
                }
                let weight = if b == 0.0 {
                    1.0
                } else {
                    bracket(d_tau_shifted(self.tau, self.sigma(j), k).norm()).powf(b)
                };
                l1 += weight * a * w;
            }
            acc += mult * (bracket(k as f64).powf(s) * l1).powi(2);
        }
        acc.sqrt()
    }
}

/// Space-time Fourier transform on the `M`-point σ-grid.
pub fn st_fourier(u: &SpaceTimeField) -> StSpectrum {
    let len = u.len();
    let half = u.grid.nyquist() + 1;
    let fft = FftPlanner::<f64>::new().plan_fft_inverse(len);
    let mut values = vec![Complex64::new(0.0, 0.0); half * len];
    for kidx in 0..half {
        let col = &mut values[kidx * len..(kidx + 1) * len];
        for (m, (slot, sample)) in col.iter_mut().zip(&u.samples).enumerate() {
            let sign = if m % 2 == 0 { u.tau } else { -u.tau };
            *slot = sample.modes()[kidx] * sign;
        }
        fft.process(col);
    }
    StSpectrum {
        tau: u.tau,
        len,
        grid: u.grid,
        values,
    }
}

/// `||⟨k⟩^s ⟨d_τ(σ+k³)⟩^b ũ||_{L²l²}`.
pub fn xsb_norm(u: &SpaceTimeField, s: f64, b: f64) -> f64 {
    st_fourier(u).weighted_l2(s, b).sqrt()
}

/// `X^s_τ` norm: `X^{s,1/2}_τ` plus the `l²(k) L¹(σ)` norm of `⟨k⟩^s ũ`.
pub fn xs_norm(u: &SpaceTimeField, s: f64) -> Result<f64> {
    u.ensure_mean_zero()?;
    let spec = st_fourier(u);
    Ok(spec.weighted_l2(s, 0.5).sqrt() + spec.l2_l1(s, 0.0))
}

/// `Y^s_τ` norm: `X^{s,-1/2}_τ` plus the `l²(k) L¹(σ)` norm of `⟨k⟩^s ⟨d_τ(σ+k³)⟩^{-1} ũ`.
pub fn ys_norm(u: &SpaceTimeField, s: f64) -> Result<f64> {
    u.ensure_mean_zero()?;
    let spec = st_fourier(u);
    Ok(spec.weighted_l2(s, -0.5).sqrt() + spec.l2_l1(s, -1.0))
}

/// `(τ Σ_m ∫ |Π_τ u^m|⁴ dx)^{1/4}`, integrated exactly on a 2N-point grid.
pub fn l4_norm_filtered(u: &SpaceTimeField) -> Result<f64> {
    let pi = make_pi_tau(u.tau, u.grid)?;
    let points = 2 * u.grid.n_modes();
    let dx_weight = 2.0 * PI / points as f64;
    let mut acc = 0.0;
    for sample in &u.samples {
        let v = pi.apply(sample)?;
        acc += padded_samples(&v, points)
            .iter()
            .map(|x| x.powi(4))
            .sum::<f64>()
            * dx_weight;
    }
    Ok((u.tau * acc).powf(0.25))
}

/// `||Π_τ u||_{l⁴_τL⁴} / ||u||_{X^{0,1/3}_τ}`.
pub fn strichartz_ratio(u: &SpaceTimeField) -> Result<f64> {
    let den = xsb_norm(u, 0.0, 1.0 / 3.0);
    if den == 0.0 {
        return Err(Error::ZeroDenominator);
    }
    Ok(l4_norm_filtered(u)? / den)
}

/// `||∂_x Π_τ(Π_τu Π_τv)||_{Y^s_τ}` over
/// `||u||_{X^{s,1/2}} ||v||_{X^{s,1/3}} + ||v||_{X^{s,1/2}} ||u||_{X^{s,1/3}}`.
pub fn bilinear_ratio(u: &SpaceTimeField, v: &SpaceTimeField, s: f64) -> Result<f64> {
    if u.tau != v.tau || u.len() != v.len() {
        return Err(Error::InvalidParameter {
            name: "v",
            reason: "both fields must share tau and sample count".into(),
        });
    }
    u.grid.check_same(&v.grid)?;
    u.ensure_mean_zero()?;
    v.ensure_mean_zero()?;
    let (su, sv) = (st_fourier(u), st_fourier(v));
    let den = su.weighted_l2(s, 0.5).sqrt() * sv.weighted_l2(s, 1.0 / 3.0).sqrt()
        + sv.weighted_l2(s, 0.5).sqrt() * su.weighted_l2(s, 1.0 / 3.0).sqrt();
    if den == 0.0 {
        return Err(Error::ZeroDenominator);
    }
    let pi = make_pi_tau(u.tau, u.grid)?;
    let samples = u
        .samples
        .iter()
        .zip(&v.samples)
        .map(|(a, b)| {
            let prod = product_dealiased(&pi.apply(a)?, &pi.apply(b)?)?;
            pi.apply(&dx(&prod))
        })
        .collect::<Result<Vec<_>>>()?;
    let w = SpaceTimeField::new(u.tau, samples)?;
    Ok(ys_norm(&w, s)? / den)
}

#[cfg(test)]
mod tests;
