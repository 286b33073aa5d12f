//! Batch probes of the uniform-in-τ constants.
//!
//! Each probe field is a windowed free flow of a random power-law datum over
//! a fixed time window, so halving `τ` doubles the sample count rather than
//! shrinking the window.

use std::io::{self, Write};
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::{bilinear_ratio, strichartz_ratio, SpaceTimeField, MIN_SAMPLES};
use crate::error::{Error, Result};
use crate::experiments::run_jobs;
use crate::initial_data::{rough_sample, RoughDataSpec};
use crate::spectral::{pi_cutoff, GridSpec};

pub const PROBE_CSV_HEADER: &str = "probe,tau,s,b,value,seed";

/// Offset separating the second factor's seeds from the first's.
const PAIR_SEED_OFFSET: u64 = 1 << 32;

fn default_fields() -> usize {
    100
}
fn default_pairs() -> usize {
    50
}
fn default_window() -> f64 {
    1.0
}
fn default_true() -> bool {
    true
}
fn default_jobs() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    pub n_modes: usize,
    pub tau_ladder: Vec<f64>,
    /// Sobolev index of the bilinear estimate.
    #[serde(default)]
    pub s: f64,
    /// Regularity of the random data.
    #[serde(default)]
    pub data_s0: f64,
    #[serde(default = "default_fields")]
    pub strichartz_fields: usize,
    #[serde(default = "default_pairs")]
    pub bilinear_pairs: usize,
    /// Window duration; each field has `window / τ` samples.
    #[serde(default = "default_window")]
    pub window: f64,
    /// Also evaluate the worst field of each τ on a window twice as long.
    #[serde(default = "default_true")]
    pub window_doubling: bool,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_jobs")]
    pub jobs: usize,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl ProbeConfig {
    pub fn new(n_modes: usize, tau_ladder: Vec<f64>) -> Self {
        Self {
            n_modes,
            tau_ladder,
            s: 0.0,
            data_s0: 0.0,
            strichartz_fields: default_fields(),
            bilinear_pairs: default_pairs(),
            window: default_window(),
            window_doubling: true,
            seed: 0,
            jobs: 1,
            output: None,
        }
    }

    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::new(self.n_modes).map_err(|e| Error::InvalidParameter {
            name: "n_modes",
            reason: e.to_string(),
        })
    }

    fn samples(&self, tau: f64) -> usize {
        (self.window / tau).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let grid = self.grid()?;
        let invalid = |name, reason: String| Err(Error::InvalidParameter { name, reason });
        if self.tau_ladder.is_empty() || self.tau_ladder.iter().any(|t| !(*t > 0.0)) {
            return invalid("tau_ladder", "needs positive step sizes".into());
        }
        if self.tau_ladder.windows(2).any(|w| w[1] >= w[0]) {
            return invalid("tau_ladder", "must be strictly decreasing".into());
        }
        if !(self.window > 0.0 && self.window.is_finite()) {
            return invalid("window", format!("must be positive, got {}", self.window));
        }
        if self.samples(self.tau_ladder[0]) < MIN_SAMPLES {
            return invalid(
                "window",
                format!("window / tau must give at least {MIN_SAMPLES} samples"),
            );
        }
        let kmax = pi_cutoff(*self.tau_ladder.last().expect("nonempty"));
        if kmax >= grid.nyquist() {
            return invalid(
                "n_modes",
                format!("finest filter cutoff {kmax} must stay below n_modes/2"),
            );
        }
        if !(self.data_s0 >= 0.0) {
            return invalid("data_s0", "must be >= 0".into());
        }
        if self.strichartz_fields == 0 && self.bilinear_pairs == 0 {
            return invalid("strichartz_fields", "nothing to probe".into());
        }
        if self.jobs == 0 {
            return invalid("jobs", "must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub probe: String,
    pub tau: f64,
    pub s: f64,
    pub b: f64,
    pub value: f64,
    pub seed: u64,
}

/// Ratio of successive maxima, `max(τ/2) / max(τ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeGrowth {
    pub probe: String,
    pub tau_from: f64,
    pub tau_to: f64,
    pub factor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub config: ProbeConfig,
    pub rows: Vec<ProbeRow>,
    pub growth: Vec<ProbeGrowth>,
}

impl ProbeReport {
    pub fn max_growth(&self, probe: &str) -> Option<f64> {
        self.growth
            .iter()
            .filter(|g| g.probe == probe)
            .map(|g| g.factor)
            .reduce(f64::max)
    }
}

#[derive(Clone, Copy)]
enum Task {
    Strichartz { tau: usize, seed: u64, len: usize },
    Bilinear { tau: usize, seed: u64, len: usize },
}

/// Runs the Strichartz and bilinear ratio probes over the τ-ladder.
pub fn uniformity_probe(cfg: &ProbeConfig) -> Result<ProbeReport> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    let field = |tau: f64, seed: u64, len: usize| -> Result<SpaceTimeField> {
        let datum = rough_sample(&RoughDataSpec::new(cfg.data_s0, seed, grid))?;
        SpaceTimeField::windowed_free_flow(&datum, tau, len)
    };
    let eval = |task: &Task| -> Result<f64> {
        match *task {
            Task::Strichartz { tau, seed, len } => {
                strichartz_ratio(&field(cfg.tau_ladder[tau], seed, len)?)
            }
            Task::Bilinear { tau, seed, len } => {
                let t = cfg.tau_ladder[tau];
                let u = field(t, seed, len)?;
                let v = field(t, seed + PAIR_SEED_OFFSET, len)?;
                bilinear_ratio(&u, &v, cfg.s)
            }
        }
    };

    let mut tasks = Vec::new();
    for (ti, &t) in cfg.tau_ladder.iter().enumerate() {
        let len = cfg.samples(t);
        for i in 0..cfg.strichartz_fields as u64 {
            tasks.push(Task::Strichartz {
                tau: ti,
                seed: cfg.seed + i,
                len,
            });
        }
        for i in 0..cfg.bilinear_pairs as u64 {
            tasks.push(Task::Bilinear {
                tau: ti,
                seed: cfg.seed + i,
                len,
            });
        }
    }
    let values = run_jobs(cfg.jobs, &tasks, eval)?
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;

    let mut rows = Vec::new();
    let mut maxima: Vec<(String, usize, f64, u64)> = Vec::new();
    for (task, value) in tasks.iter().zip(values) {
        let (probe, tau, seed, b) = match *task {
            Task::Strichartz { tau, seed, .. } => ("strichartz", tau, seed, 1.0 / 3.0),
            Task::Bilinear { tau, seed, .. } => ("bilinear", tau, seed, -0.5),
        };
        let s = if probe == "bilinear" { cfg.s } else { 0.0 };
        rows.push(ProbeRow {
            probe: probe.into(),
            tau: cfg.tau_ladder[tau],
            s,
            b,
            value,
            seed,
        });
        match maxima.iter_mut().find(|m| m.0 == probe && m.1 == tau) {
            Some(m) if value > m.2 => {
                m.2 = value;
                m.3 = seed;
            }
            Some(_) => {}
            None => maxima.push((probe.into(), tau, value, seed)),
        }
    }

    let mut doubled = Vec::new();
    if cfg.window_doubling {
        let tasks: Vec<Task> = maxima
            .iter()
            .map(|(probe, tau, _, seed)| {
                let len = 2 * cfg.samples(cfg.tau_ladder[*tau]);
                if probe == "strichartz" {
                    Task::Strichartz { tau: *tau, seed: *seed, len }
                } else {
                    Task::Bilinear { tau: *tau, seed: *seed, len }
                }
            })
            .collect();
        doubled = run_jobs(cfg.jobs, &tasks, eval)?
            .into_iter()
            .collect::<Result<Vec<f64>>>()?;
    }

    let mut growth = Vec::new();
    for (i, (probe, tau, value, seed)) in maxima.iter().enumerate() {
        let (s, b) = if probe == "strichartz" {
            (0.0, 1.0 / 3.0)
        } else {
            (cfg.s, -0.5)
        };
        let t = cfg.tau_ladder[*tau];
        rows.push(ProbeRow {
            probe: format!("{probe}_max"),
            tau: t,
            s,
            b,
            value: *value,
            seed: *seed,
        });
        if let Some(d) = doubled.get(i) {
            rows.push(ProbeRow {
                probe: format!("{probe}_max_window2"),
                tau: t,
                s,
                b,
                value: *d,
                seed: *seed,
            });
        }
        if let Some(prev) = maxima[..i]
            .iter()
            .rev()
            .find(|m| &m.0 == probe && m.1 + 1 == *tau)
        {
            growth.push(ProbeGrowth {
                probe: probe.clone(),
                tau_from: cfg.tau_ladder[prev.1],
                tau_to: t,
                factor: value / prev.2,
            });
        }
    }
    Ok(ProbeReport {
        config: cfg.clone(),
        rows,
        growth,
    })
}

pub fn write_probe_csv<W: Write>(report: &ProbeReport, mut w: W) -> io::Result<()> {
    writeln!(w, "{PROBE_CSV_HEADER}")?;
    for r in &report.rows {
        writeln!(
            w,
            "{},{:e},{},{},{:e},{}",
            r.probe, r.tau, r.s, r.b, r.value, r.seed
        )?;
    }
    Ok(())
}
