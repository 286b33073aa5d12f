use std::fmt;
use std::path::PathBuf;

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::initial_data::{rough_sample, smooth_profile, RoughDataSpec, SmoothProfile};
use crate::schemes::Scheme;
use crate::spectral::{pi_cutoff, GridSpec, SpectralField};

impl Serialize for Scheme {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Scheme {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let name = String::deserialize(d)?;
        Scheme::from_name(&name)
            .ok_or_else(|| de::Error::custom(format!("unknown scheme `{name}`")))
    }
}

fn default_margin() -> f64 {
    RoughDataSpec::DEFAULT_MARGIN
}

fn default_norm() -> f64 {
    1.0
}

/// Initial datum of a study. Rough data is drawn once per seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    Cosine,
    TwoMode,
    Rough {
        s0: f64,
        #[serde(default = "default_margin")]
        margin: f64,
        #[serde(default = "default_norm")]
        normalize_to: f64,
    },
}

impl InitialData {
    /// Regularity index; smooth profiles report infinity.
    pub fn s0(&self) -> f64 {
        match self {
            InitialData::Rough { s0, .. } => *s0,
            _ => f64::INFINITY,
        }
    }

    pub fn is_smooth(&self) -> bool {
        !matches!(self, InitialData::Rough { .. })
    }

    pub fn sample(&self, grid: GridSpec, seed: u64) -> Result<SpectralField> {
        match *self {
            InitialData::Cosine => Ok(smooth_profile(SmoothProfile::Cosine, grid)),
            InitialData::TwoMode => Ok(smooth_profile(SmoothProfile::TwoMode, grid)),
            InitialData::Rough {
                s0,
                margin,
                normalize_to,
            } => rough_sample(&RoughDataSpec {
                s0,
                margin,
                seed,
                grid,
                normalize_to,
            }),
        }
    }
}

impl fmt::Display for InitialData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialData::Cosine => f.write_str("cosine"),
            InitialData::TwoMode => f.write_str("two_mode"),
            InitialData::Rough { s0, .. } => write!(f, "rough(s0={s0})"),
        }
    }
}

/// How the reference flow is computed and checked.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferencePolicy {
    /// Coarsest step of the reference ladder; runs use `tau_ref`, `tau_ref/2`, `tau_ref/4`.
    pub tau_ref: f64,
    /// Relative acceptance bound: the validation pair must agree to this
    /// fraction of the smallest measured error.
    #[serde(default = "ReferencePolicy::default_tolerance")]
    pub tolerance: f64,
}

impl ReferencePolicy {
    pub const DEFAULT_TOLERANCE: f64 = 0.01;

    fn default_tolerance() -> f64 {
        Self::DEFAULT_TOLERANCE
    }

    pub fn new(tau_ref: f64) -> Self {
        Self {
            tau_ref,
            tolerance: Self::DEFAULT_TOLERANCE,
        }
    }
}

fn default_horizon() -> f64 {
    1.0
}
fn default_gap_samples() -> usize {
    16
}
fn default_local_refinement() -> usize {
    256
}
fn default_jobs() -> usize {
    1
}
fn default_seeds() -> Vec<u64> {
    vec![0]
}

/// Everything a study needs; mirrors the TOML accepted by the command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schemes: Vec<Scheme>,
    /// Strictly decreasing step sizes.
    pub tau_ladder: Vec<f64>,
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    pub data: InitialData,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    pub n_modes: usize,
    pub reference: ReferencePolicy,
    /// Half-open index range into `tau_ladder` used for fitting.
    /// Defaults to everything but the two coarsest steps.
    #[serde(default)]
    pub fit_window: Option<[usize; 2]>,
    /// Switches the quadratic term off everywhere (free-flow sanity runs).
    #[serde(default)]
    pub linear_only: bool,
    /// Sample times in `(0, T]` for the sup in the projection-gap study.
    #[serde(default = "default_gap_samples")]
    pub gap_samples: usize,
    /// Fine substeps per step in the local-error study.
    #[serde(default = "default_local_refinement")]
    pub local_refinement: usize,
    /// Worker threads; results never depend on it.
    #[serde(default = "default_jobs")]
    pub jobs: usize,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

/// `round(a / b)` when `a / b` is an integer up to round-off.
pub(crate) fn exact_ratio(a: f64, b: f64) -> Option<usize> {
    let r = a / b;
    let n = r.round();
    if n >= 1.0 && (r - n).abs() <= 1e-9 * n {
        Some(n as usize)
    } else {
        None
    }
}

impl ExperimentConfig {
    /// A config with the usual defaults for everything but the essentials.
    pub fn new(
        schemes: Vec<Scheme>,
        tau_ladder: Vec<f64>,
        data: InitialData,
        n_modes: usize,
        tau_ref: f64,
    ) -> Self {
        Self {
            schemes,
            tau_ladder,
            horizon: default_horizon(),
            data,
            seeds: default_seeds(),
            n_modes,
            reference: ReferencePolicy::new(tau_ref),
            fit_window: None,
            linear_only: false,
            gap_samples: default_gap_samples(),
            local_refinement: default_local_refinement(),
            jobs: default_jobs(),
            output: None,
        }
    }

    /// Dyadic ladder `2^{-lo}, ..., 2^{-hi}`.
    pub fn dyadic_ladder(lo: i32, hi: i32) -> Vec<f64> {
        (lo..=hi).map(|p| 2f64.powi(-p)).collect()
    }

    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::new(self.n_modes).map_err(|e| invalid("n_modes", e.to_string()))
    }

    pub fn tau_min(&self) -> f64 {
        self.tau_ladder.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Ladder indices used by the fit.
    pub fn fit_range(&self) -> std::ops::Range<usize> {
        let len = self.tau_ladder.len();
        match self.fit_window {
            Some([a, b]) => a.min(len)..b.min(len),
            None => 2.min(len)..len,
        }
    }

    /// Checks the invariants shared by all studies.
    pub fn validate(&self) -> Result<()> {
        let grid = self.grid()?;
        if self.schemes.is_empty() {
            return Err(invalid("schemes", "at least one scheme is required"));
        }
        if self.seeds.is_empty() {
            return Err(invalid("seeds", "at least one seed is required"));
        }
        if self.tau_ladder.is_empty() {
            return Err(invalid("tau_ladder", "must not be empty"));
        }
        if self.tau_ladder.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return Err(invalid("tau_ladder", "step sizes must be positive and finite"));
        }
        if self.tau_ladder.windows(2).any(|w| w[1] >= w[0]) {
            return Err(invalid("tau_ladder", "must be strictly decreasing"));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(invalid("horizon", format!("must be positive, got {}", self.horizon)));
        }
        if let Some(t) = self
            .tau_ladder
            .iter()
            .find(|&&t| exact_ratio(self.horizon, t).is_none())
        {
            return Err(invalid(
                "tau_ladder",
                format!("horizon {} is not an integer multiple of {t}", self.horizon),
            ));
        }
        let kmax = pi_cutoff(self.tau_min());
        if grid.nyquist() <= 2 * kmax {
            return Err(invalid(
                "n_modes",
                format!(
                    "n_modes/2 = {} must exceed twice the finest filter cutoff {kmax}",
                    grid.nyquist()
                ),
            ));
        }
        let r = &self.reference;
        if !(r.tau_ref > 0.0 && r.tau_ref * 16.0 <= self.tau_min() * (1.0 + 1e-12)) {
            return Err(invalid(
                "reference.tau_ref",
                format!(
                    "must be at least 16x smaller than the finest step {}, got {}",
                    self.tau_min(),
                    r.tau_ref
                ),
            ));
        }
        if exact_ratio(self.horizon, r.tau_ref).is_none() {
            return Err(invalid(
                "reference.tau_ref",
                "horizon is not an integer multiple of tau_ref",
            ));
        }
        if !(r.tolerance > 0.0) {
            return Err(invalid("reference.tolerance", "must be positive"));
        }
        if let Some([a, b]) = self.fit_window {
            if a >= b || b > self.tau_ladder.len() {
                return Err(invalid(
                    "fit_window",
                    format!("[{a}, {b}) is not a range inside the ladder"),
                ));
            }
        }
        if self.gap_samples == 0 {
            return Err(invalid("gap_samples", "must be positive"));
        }
        if self.local_refinement == 0 {
            return Err(invalid("local_refinement", "must be positive"));
        }
        if self.jobs == 0 {
            return Err(invalid("jobs", "must be positive"));
        }
        if let InitialData::Rough {
            s0,
            margin,
            normalize_to,
        } = self.data
        {
            RoughDataSpec {
                s0,
                margin,
                seed: 0,
                grid,
                normalize_to,
            }
            .validate()?;
        }
        Ok(())
    }
}
