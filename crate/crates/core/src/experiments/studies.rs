use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{exact_ratio, ExperimentConfig};
use super::fit::{rate_fit, RateFit};
use super::reference::{resonance_trajectory, richardson, ReferenceCheck, ReferenceFlow};
use crate::error::{Error, Result};
use crate::schemes::{evolve, step, FilterPolicy, Scheme, StepContext};
use crate::spectral::{make_pi_tau, GridSpec, SpectralField};

/// Which study produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StudyKind {
    Convergence,
    ProjectionGap,
    LocalError,
}

impl StudyKind {
    pub fn name(&self) -> &'static str {
        match self {
            StudyKind::Convergence => "convergence",
            StudyKind::ProjectionGap => "projection_gap",
            StudyKind::LocalError => "local_error",
        }
    }
}

impl fmt::Display for StudyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Fate of one measured point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointStatus {
    Ok,
    /// The scheme produced non-finite values.
    BlowUp,
    /// The reference failed its validation pair; the error is reported but not fitted.
    ReferenceRejected,
    /// The reference itself blew up; no error is available.
    ReferenceBlowUp,
}

impl PointStatus {
    pub fn name(&self) -> &'static str {
        match self {
            PointStatus::Ok => "ok",
            PointStatus::BlowUp => "blow_up",
            PointStatus::ReferenceRejected => "reference_rejected",
            PointStatus::ReferenceBlowUp => "reference_blow_up",
        }
    }
}

/// One `(label, seed, τ)` measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRow {
    /// Scheme name, or the study name when no scheme is involved.
    pub label: String,
    pub seed: u64,
    pub tau: f64,
    /// Evolution time of the measurement.
    pub time: f64,
    /// `L^2` error; `None` when the point is missing.
    pub error: Option<f64>,
    pub status: PointStatus,
}

/// Slope fit of one `(label, seed)` series over the fit window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesFit {
    pub label: String,
    pub seed: u64,
    /// Present only with at least three valid points in the window.
    pub fit: Option<RateFit>,
    pub points_used: usize,
    /// Step sizes inside the window that were not fitted.
    pub missing: Vec<f64>,
}

/// Per-label median over seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelSummary {
    pub label: String,
    pub slopes: Vec<f64>,
    pub median_slope: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub study: StudyKind,
    pub config: ExperimentConfig,
    pub rows: Vec<ErrorRow>,
    /// One entry per seed for studies that use a reference flow.
    pub references: Vec<ReferenceCheck>,
    pub fits: Vec<SeriesFit>,
    pub summary: Vec<LabelSummary>,
}

/// Historical name kept for the convergence study's output.
pub type ConvergenceReport = StudyReport;

impl StudyReport {
    pub fn summary_for(&self, label: &str) -> Option<&LabelSummary> {
        self.summary.iter().find(|s| s.label == label)
    }

    pub fn median_slope(&self, label: &str) -> Option<f64> {
        self.summary_for(label).and_then(|s| s.median_slope)
    }

    /// True when every point is missing (every scheme run blew up).
    pub fn all_blown_up(&self) -> bool {
        !self.rows.is_empty() && self.rows.iter().all(|r| r.error.is_none())
    }

    fn assemble(
        study: StudyKind,
        config: &ExperimentConfig,
        rows: Vec<ErrorRow>,
        references: Vec<ReferenceCheck>,
    ) -> Self {
        let window = config.fit_range();
        let mut labels: Vec<String> = Vec::new();
        for r in &rows {
            if !labels.contains(&r.label) {
                labels.push(r.label.clone());
            }
        }
        let mut fits = Vec::new();
        for label in &labels {
            for &seed in &config.seeds {
                let series: Vec<&ErrorRow> = rows
                    .iter()
                    .filter(|r| &r.label == label && r.seed == seed)
                    .collect();
                let mut points = Vec::new();
                let mut missing = Vec::new();
                for (i, r) in series.iter().enumerate() {
                    if !window.contains(&i) {
                        continue;
                    }
                    match (r.status, r.error) {
                        (PointStatus::Ok, Some(e)) if e > 0.0 => points.push((r.tau, e)),
                        _ => missing.push(r.tau),
                    }
                }
                fits.push(SeriesFit {
                    label: label.clone(),
                    seed,
                    fit: rate_fit(&points).ok(),
                    points_used: points.len(),
                    missing,
                });
            }
        }
        let summary = labels
            .iter()
            .map(|label| {
                let slopes: Vec<f64> = fits
                    .iter()
                    .filter(|f| &f.label == label)
                    .filter_map(|f| f.fit.map(|r| r.slope))
                    .collect();
                LabelSummary {
                    label: label.clone(),
                    median_slope: median(&slopes),
                    slopes,
                }
            })
            .collect();
        Self {
            study,
            config: config.clone(),
            rows,
            references,
            fits,
            summary,
        }
    }
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    })
}

/// Maps `f` over `keys` on `jobs` worker threads. Output order follows `keys`.
pub fn run_jobs<K, R, F>(jobs: usize, keys: &[K], f: F) -> Result<Vec<R>>
where
    K: Sync,
    R: Send,
    F: Fn(&K) -> R + Sync + Send,
{
    if jobs <= 1 {
        return Ok(keys.iter().map(f).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidParameter {
            name: "jobs",
            reason: e.to_string(),
        })?;
    Ok(pool.install(|| keys.par_iter().map(f).collect()))
}

fn context(tau: f64, grid: GridSpec, policy: FilterPolicy, linear_only: bool) -> Result<StepContext> {
    let ctx = StepContext::with_filter(tau, grid, policy)?;
    Ok(if linear_only {
        ctx.without_nonlinearity()
    } else {
        ctx
    })
}

fn steps(cfg: &ExperimentConfig, tau: f64) -> usize {
    exact_ratio(cfg.horizon, tau).expect("validated ladder")
}

fn initial_data(cfg: &ExperimentConfig, grid: GridSpec) -> Result<Vec<SpectralField>> {
    cfg.seeds.iter().map(|&s| cfg.data.sample(grid, s)).collect()
}

fn reference_flow(cfg: &ExperimentConfig, filter: FilterPolicy) -> ReferenceFlow {
    ReferenceFlow {
        filter,
        nonlinear: !cfg.linear_only,
    }
}

const LEVELS: [f64; 3] = [1.0, 0.5, 0.25];

enum Job {
    /// Reference level `level` of seed `seed`, with the given filter.
    Reference {
        seed: usize,
        level: usize,
        filter: FilterPolicy,
    },
    /// A scheme run to the horizon.
    Scheme {
        scheme: Scheme,
        seed: usize,
        tau: usize,
    },
}

enum Output {
    Trajectory(Result<Vec<SpectralField>>),
    Final(Result<SpectralField>),
}

impl Output {
    fn trajectory(self) -> Result<Vec<SpectralField>> {
        match self {
            Output::Trajectory(t) => t,
            Output::Final(_) => unreachable!("job kinds are fixed by position"),
        }
    }

    fn last(self) -> Result<SpectralField> {
        match self {
            Output::Final(u) => u,
            Output::Trajectory(_) => unreachable!("job kinds are fixed by position"),
        }
    }
}

/// Runs reference levels and scheme runs as one deterministic batch.
fn execute(
    cfg: &ExperimentConfig,
    grid: GridSpec,
    u0: &[SpectralField],
    samples: usize,
    jobs: &[Job],
) -> Result<Vec<Output>> {
    run_jobs(cfg.jobs, jobs, |job| match *job {
        Job::Reference {
            seed,
            level,
            filter,
        } => {
            let h = cfg.reference.tau_ref * LEVELS[level];
            Output::Trajectory(resonance_trajectory(
                &u0[seed],
                cfg.horizon,
                h,
                reference_flow(cfg, filter),
                samples,
            ))
        }
        Job::Scheme { scheme, seed, tau } => {
            let t = cfg.tau_ladder[tau];
            Output::Final(
                context(t, grid, FilterPolicy::StepSize, cfg.linear_only)
                    .and_then(|ctx| evolve(&ctx, scheme, &u0[seed], steps(cfg, t), &mut [])),
            )
        }
    })
}

fn reference_jobs(n_seeds: usize, filter: FilterPolicy) -> Vec<Job> {
    (0..n_seeds)
        .flat_map(|seed| {
            (0..LEVELS.len()).map(move |level| Job::Reference {
                seed,
                level,
                filter,
            })
        })
        .collect()
}

/// Collects three consecutive level outputs into a reference run.
fn take_reference(
    outputs: &mut impl Iterator<Item = Output>,
) -> Result<super::reference::ReferenceRun> {
    let a = outputs.next().expect("level 0").trajectory();
    let b = outputs.next().expect("level 1").trajectory();
    let c = outputs.next().expect("level 2").trajectory();
    let (a, b, c) = (a?, b?, c?);
    Ok(richardson([&a, &b, &c]))
}

/// Error of each scheme at `T` against the unfiltered truncated flow.
pub fn convergence_study(cfg: &ExperimentConfig) -> Result<StudyReport> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    let u0 = initial_data(cfg, grid)?;
    let n_seeds = cfg.seeds.len();

    let mut jobs = reference_jobs(n_seeds, FilterPolicy::Open);
    for &scheme in &cfg.schemes {
        for seed in 0..n_seeds {
            for tau in 0..cfg.tau_ladder.len() {
                jobs.push(Job::Scheme { scheme, seed, tau });
            }
        }
    }
    let mut outputs = execute(cfg, grid, &u0, 1, &jobs)?.into_iter();
    let references: Vec<_> = (0..n_seeds)
        .map(|_| take_reference(&mut outputs))
        .collect();
    let finals: Vec<Result<SpectralField>> = outputs.map(Output::last).collect();

    // finals are ordered (scheme, seed, tau)
    let n_tau = cfg.tau_ladder.len();
    let index = |sc: usize, seed: usize, tau: usize| (sc * n_seeds + seed) * n_tau + tau;
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for (seed_i, &seed) in cfg.seeds.iter().enumerate() {
        let reference = match &references[seed_i] {
            Ok(r) => Some(r),
            Err(Error::BlowUp { .. }) => None,
            Err(e) => return Err(e.clone()),
        };
        let mut seed_rows = Vec::new();
        for (sc, scheme) in cfg.schemes.iter().enumerate() {
            for (ti, &tau) in cfg.tau_ladder.iter().enumerate() {
                let (error, status) = match (&finals[index(sc, seed_i, ti)], reference) {
                    (_, None) => (None, PointStatus::ReferenceBlowUp),
                    (Ok(u), Some(r)) => (Some(u.distance(r.last())?), PointStatus::Ok),
                    (Err(Error::BlowUp { .. }), _) => (None, PointStatus::BlowUp),
                    (Err(e), _) => return Err(e.clone()),
                };
                seed_rows.push(ErrorRow {
                    label: scheme.name().to_string(),
                    seed,
                    tau,
                    time: cfg.horizon,
                    error,
                    status,
                });
            }
        }
        if let Some(r) = reference {
            let errors: Vec<f64> = seed_rows.iter().filter_map(|r| r.error).collect();
            let check =
                ReferenceCheck::new(seed, r.pair_difference, cfg.reference.tolerance, &errors);
            if !check.accepted {
                for row in seed_rows.iter_mut().filter(|r| r.status == PointStatus::Ok) {
                    row.status = PointStatus::ReferenceRejected;
                }
            }
            checks.push(check);
        }
        rows.extend(seed_rows);
    }
    // order rows by (scheme, seed, tau)
    rows.sort_by_key(|r| {
        let sc = cfg.schemes.iter().position(|s| s.name() == r.label).unwrap_or(0);
        let seed = cfg.seeds.iter().position(|&s| s == r.seed).unwrap_or(0);
        (sc, seed)
    });
    Ok(StudyReport::assemble(
        StudyKind::Convergence,
        cfg,
        rows,
        checks,
    ))
}

/// `sup_t ||u(t) - u_τ(t)||` between the truncated flow and the projected
/// flow with filter `Π_τ`, both integrated at `τ_ref`.
pub fn projection_gap_study(cfg: &ExperimentConfig) -> Result<StudyReport> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    let u0 = initial_data(cfg, grid)?;
    let n_seeds = cfg.seeds.len();
    let n_tau = cfg.tau_ladder.len();
    let samples = cfg.gap_samples;
    let fine_steps = exact_ratio(cfg.horizon, cfg.reference.tau_ref * LEVELS[2])
        .expect("validated reference step");
    if fine_steps % samples != 0 {
        return Err(Error::InvalidParameter {
            name: "gap_samples",
            reason: format!("{samples} samples do not divide the coarsest reference run"),
        });
    }

    let mut jobs = reference_jobs(n_seeds, FilterPolicy::Open);
    for &tau in &cfg.tau_ladder {
        jobs.extend(reference_jobs(n_seeds, FilterPolicy::Tau(tau)));
    }
    let mut outputs = execute(cfg, grid, &u0, samples, &jobs)?.into_iter();
    let full: Vec<_> = (0..n_seeds).map(|_| take_reference(&mut outputs)).collect();
    // projected runs are ordered (tau, seed)
    let projected: Vec<_> = (0..n_tau * n_seeds)
        .map(|_| take_reference(&mut outputs))
        .collect();

    let label = StudyKind::ProjectionGap.name().to_string();
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for (seed_i, &seed) in cfg.seeds.iter().enumerate() {
        let mut seed_rows = Vec::new();
        let mut pair_difference = match &full[seed_i] {
            Ok(r) => r.pair_difference,
            Err(Error::BlowUp { .. }) => f64::NAN,
            Err(e) => return Err(e.clone()),
        };
        for (ti, &tau) in cfg.tau_ladder.iter().enumerate() {
            let (error, status) = match (&full[seed_i], &projected[ti * n_seeds + seed_i]) {
                (Ok(u), Ok(v)) => {
                    pair_difference = pair_difference.max(v.pair_difference);
                    let mut gap = 0.0f64;
                    for (a, b) in u.states.iter().zip(&v.states) {
                        gap = gap.max(a.distance(b)?);
                    }
                    (Some(gap), PointStatus::Ok)
                }
                (Err(Error::BlowUp { .. }), _) | (_, Err(Error::BlowUp { .. })) => {
                    (None, PointStatus::ReferenceBlowUp)
                }
                (Err(e), _) | (_, Err(e)) => return Err(e.clone()),
            };
            seed_rows.push(ErrorRow {
                label: label.clone(),
                seed,
                tau,
                time: cfg.horizon,
                error,
                status,
            });
        }
        if pair_difference.is_finite() {
            let errors: Vec<f64> = seed_rows.iter().filter_map(|r| r.error).collect();
            let check =
                ReferenceCheck::new(seed, pair_difference, cfg.reference.tolerance, &errors);
            if !check.accepted {
                for row in seed_rows.iter_mut().filter(|r| r.status == PointStatus::Ok) {
                    row.status = PointStatus::ReferenceRejected;
                }
            }
            checks.push(check);
        }
        rows.extend(seed_rows);
    }
    Ok(StudyReport::assemble(
        StudyKind::ProjectionGap,
        cfg,
        rows,
        checks,
    ))
}

/// One-step defect `||Φ^τ(Π_τu0) - φ^τ(Π_τu0)||` against `local_refinement`
/// resonance substeps of the projected equation.
pub fn local_error_study(cfg: &ExperimentConfig) -> Result<StudyReport> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    let u0 = initial_data(cfg, grid)?;
    let mut keys = Vec::new();
    for &scheme in &cfg.schemes {
        for seed in 0..cfg.seeds.len() {
            for tau in 0..cfg.tau_ladder.len() {
                keys.push((scheme, seed, tau));
            }
        }
    }
    let m = cfg.local_refinement;
    let results = run_jobs(cfg.jobs, &keys, |&(scheme, seed, ti)| -> Result<Option<f64>> {
        let tau = cfg.tau_ladder[ti];
        let start = make_pi_tau(tau, grid)?.apply(&u0[seed])?;
        let coarse = context(tau, grid, FilterPolicy::StepSize, cfg.linear_only)?;
        let fine = context(tau / m as f64, grid, FilterPolicy::Tau(tau), cfg.linear_only)?;
        let one = match step(&coarse, scheme, &start) {
            Ok(u) if u.is_finite() => u,
            Ok(_) | Err(Error::BlowUp { .. }) => return Ok(None),
            Err(e) => return Err(e),
        };
        let exact = match evolve(&fine, Scheme::Resonance, &start, m, &mut []) {
            Ok(u) => u,
            Err(Error::BlowUp { .. }) => return Ok(None),
            Err(e) => return Err(e),
        };
        Ok(Some(one.distance(&exact)?))
    })?;
    let mut rows = Vec::new();
    for (&(scheme, seed, ti), res) in keys.iter().zip(results) {
        let error = res?;
        rows.push(ErrorRow {
            label: scheme.name().to_string(),
            seed: cfg.seeds[seed],
            tau: cfg.tau_ladder[ti],
            time: cfg.tau_ladder[ti],
            error,
            status: if error.is_some() {
                PointStatus::Ok
            } else {
                PointStatus::BlowUp
            },
        });
    }
    Ok(StudyReport::assemble(
        StudyKind::LocalError,
        cfg,
        rows,
        Vec::new(),
    ))
}

#[cfg(test)]
mod tests;
