//! Mean-zero initial data of prescribed Sobolev regularity.
//!
//! Rough samples use a pure power-law spectrum with i.i.d. uniform phases
//! drawn from ChaCha8 (`rand_chacha`), seeded with `seed_from_u64`. Phases
//! are drawn for `k = 1, 2, ...` in order, so the same seed on a finer grid
//! extends the coarse sample rather than replacing it.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{sobolev_norm, GridSpec, SpectralField};

/// Parameters of a rough sample: `|û(k)| ∝ |k|^{-(s0 + 1/2 + margin)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoughDataSpec {
    pub s0: f64,
    pub margin: f64,
    pub seed: u64,
    pub grid: GridSpec,
    pub normalize_to: f64,
}

impl RoughDataSpec {
    pub const DEFAULT_MARGIN: f64 = 0.01;

    pub fn new(s0: f64, seed: u64, grid: GridSpec) -> Self {
        Self {
            s0,
            margin: Self::DEFAULT_MARGIN,
            seed,
            grid,
            normalize_to: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s0 >= 0.0 && self.s0.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "s0",
                reason: format!("must be finite and >= 0, got {}", self.s0),
            });
        }
        if !(self.margin > 0.0 && self.margin.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "margin",
                reason: format!("must be positive, got {}", self.margin),
            });
        }
        if !(self.normalize_to > 0.0 && self.normalize_to.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "normalize_to",
                reason: format!("must be positive, got {}", self.normalize_to),
            });
        }
        Ok(())
    }

    /// Decay exponent of `|û(k)|`.
    pub fn exponent(&self) -> f64 {
        self.s0 + 0.5 + self.margin
    }
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Power-law field with random phases, rescaled to the requested `L^2` norm.
///
/// Modes `1..N/2` are populated; the zero and Nyquist modes are zero.
pub fn rough_sample(spec: &RoughDataSpec) -> Result<SpectralField> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let p = spec.exponent();
    let h = spec.grid.nyquist();
    let raw = SpectralField::from_fn(spec.grid, |k| {
        if k == 0 || k == h {
            Complex64::new(0.0, 0.0)
        } else {
            let theta = 2.0 * PI * uniform(&mut rng);
            Complex64::from_polar((k as f64).powf(-p), theta)
        }
    })?;
    Ok(raw.scaled(spec.normalize_to / raw.l2_norm()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothProfile {
    /// `cos x`
    Cosine,
    /// `cos x + (1/2) sin 2x`
    TwoMode,
}

pub fn smooth_profile(profile: SmoothProfile, grid: GridSpec) -> SpectralField {
    SpectralField::from_fn(grid, |k| match (profile, k) {
        (_, 1) => Complex64::new(0.5, 0.0),
        (SmoothProfile::TwoMode, 2) => Complex64::new(0.0, -0.25),
        _ => Complex64::new(0.0, 0.0),
    })
    .expect("grid has at least 8 modes")
}

/// `(s, ||f||_{H^s})` for each requested `s`.
///
/// On a finite grid every norm is finite; regularity shows up as growth of
/// the curve with `s` and as sensitivity to grid refinement, not divergence.
pub fn empirical_regularity(f: &SpectralField, s_grid: &[f64]) -> Vec<(f64, f64)> {
    s_grid.iter().map(|&s| (s, sobolev_norm(f, s))).collect()
}
