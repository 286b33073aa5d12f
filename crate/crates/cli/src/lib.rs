//! Command-line front end for `kdvlab`: TOML configs in, CSV/JSON/SVG and
//! field snapshots out.
//!
//! Exit status: 0 success, 2 config error, 3 every run blew up, 4 I/O error,
//! 1 anything else. Failures also print a one-line JSON record on stderr.

pub mod config;
pub mod error;
pub mod snapshot;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use kdvlab::bourgain::{uniformity_probe, write_probe_csv, ProbeConfig};
use kdvlab::experiments::{
    convergence_study, local_error_study, projection_gap_study, write_report, ExperimentConfig,
    StudyReport,
};
use kdvlab::schemes::Observer;
use kdvlab::{evolve, SpectralField, StepContext};

use config::{EvolveConfig, GenDataConfig};
pub use error::CliError;
use snapshot::Snapshot;

#[derive(Debug, Parser)]
#[command(name = "kdvlab", version, about = "Filtered low-regularity KdV integrators: studies, probes, snapshots")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: CommonOpts,
}

#[derive(Debug, Clone, Args)]
pub struct CommonOpts {
    /// TOML config for the subcommand
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (overrides `output` in the config; default `out`)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (overrides `jobs`)
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Replace the config's seeds (comma separated or repeated)
    #[arg(long, global = true, value_delimiter = ',')]
    pub seed_override: Vec<u64>,
    /// Validate the config and exit without running
    #[arg(long, global = true)]
    pub check: bool,
    /// Also write a log-log SVG plot (studies only)
    #[arg(long, global = true)]
    pub plot: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// One step of a scheme
    Step,
    /// Many steps of a scheme
    Evolve,
    /// Convergence study against the unfiltered reference flow
    Converge,
    /// Gap between the full and the projected equation
    ProjectionGap,
    /// One-step defect study
    LocalError,
    /// Uniformity probes of the discrete Strichartz and bilinear constants
    BourgainProbe,
    /// Write an initial datum as a snapshot
    GenData,
}

/// What a successful run produced.
#[derive(Debug, Default)]
pub struct Outcome {
    pub artifacts: Vec<PathBuf>,
    /// Human-readable lines for stdout.
    pub summary: Vec<String>,
}

fn config_path(opts: &CommonOpts) -> Result<&Path, CliError> {
    opts.config
        .as_deref()
        .ok_or_else(|| CliError::config(Some("--config"), "a config file is required"))
}

fn out_dir(opts: &CommonOpts, from_config: &Option<PathBuf>) -> PathBuf {
    opts.out
        .clone()
        .or_else(|| from_config.clone())
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(&dir.display().to_string(), e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let name = path.display().to_string();
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Runtime(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(&name, e))
}

pub fn run(cmd: Command, opts: &CommonOpts) -> Result<Outcome, CliError> {
    match cmd {
        Command::Converge | Command::ProjectionGap | Command::LocalError => run_study(cmd, opts),
        Command::BourgainProbe => run_probe(opts),
        Command::GenData => run_gen_data(opts),
        Command::Step | Command::Evolve => run_evolve(cmd, opts),
    }
}

fn run_study(cmd: Command, opts: &CommonOpts) -> Result<Outcome, CliError> {
    let mut cfg: ExperimentConfig = config::load(config_path(opts)?)?;
    if !opts.seed_override.is_empty() {
        cfg.seeds = opts.seed_override.clone();
    }
    if let Some(j) = opts.jobs {
        cfg.jobs = j;
    }
    cfg.validate()?;
    if opts.check {
        return Ok(Outcome {
            summary: vec!["config ok".into()],
            ..Outcome::default()
        });
    }
    let report: StudyReport = match cmd {
        Command::Converge => convergence_study(&cfg)?,
        Command::ProjectionGap => projection_gap_study(&cfg)?,
        _ => local_error_study(&cfg)?,
    };
    let dir = out_dir(opts, &cfg.output);
    let artifacts = write_report(&report, &dir, opts.plot)?;
    if report.all_blown_up() {
        return Err(CliError::AllBlowUp(format!(
            "no finite result in {} (artifacts written to {})",
            report.study,
            dir.display()
        )));
    }
    let mut summary: Vec<String> = report
        .summary
        .iter()
        .map(|s| match s.median_slope {
            Some(m) => format!("{}: median slope {m:.4} over {} series", s.label, s.slopes.len()),
            None => format!("{}: no slope (fewer than 3 valid points)", s.label),
        })
        .collect();
    for c in report.references.iter().filter(|c| !c.accepted) {
        summary.push(format!(
            "seed {}: reference rejected, pair difference {:.3e} > {:.3e}",
            c.seed, c.pair_difference, c.threshold
        ));
    }
    Ok(Outcome { artifacts, summary })
}

fn run_probe(opts: &CommonOpts) -> Result<Outcome, CliError> {
    let mut cfg: ProbeConfig = config::load(config_path(opts)?)?;
    if let Some(&s) = opts.seed_override.first() {
        cfg.seed = s;
    }
    if let Some(j) = opts.jobs {
        cfg.jobs = j;
    }
    cfg.validate()?;
    if opts.check {
        return Ok(Outcome {
            summary: vec!["config ok".into()],
            ..Outcome::default()
        });
    }
    let report = uniformity_probe(&cfg)?;
    let dir = out_dir(opts, &cfg.output);
    create_dir(&dir)?;
    let csv = dir.join("bourgain_probe.csv");
    let name = csv.display().to_string();
    let mut f = io::BufWriter::new(fs::File::create(&csv).map_err(|e| CliError::io(&name, e))?);
    write_probe_csv(&report, &mut f)
        .and_then(|_| f.flush())
        .map_err(|e| CliError::io(&name, e))?;
    let json = dir.join("bourgain_probe.json");
    write_json(&json, &report)?;
    let summary = ["strichartz", "bilinear"]
        .iter()
        .filter_map(|p| {
            report
                .max_growth(p)
                .map(|g| format!("{p}: largest growth of the max ratio per halving {g:.4}"))
        })
        .collect();
    Ok(Outcome {
        artifacts: vec![csv, json],
        summary,
    })
}

fn run_gen_data(opts: &CommonOpts) -> Result<Outcome, CliError> {
    let mut cfg: GenDataConfig = config::load(config_path(opts)?)?;
    if let Some(&s) = opts.seed_override.first() {
        cfg.seed = s;
    }
    let grid = config::grid(cfg.n_modes)?;
    let field = cfg.data.sample(grid, cfg.seed)?;
    if opts.check {
        return Ok(Outcome {
            summary: vec!["config ok".into()],
            ..Outcome::default()
        });
    }
    let dir = out_dir(opts, &cfg.output);
    create_dir(&dir)?;
    let snap = Snapshot {
        field,
        tau: 0.0,
        time: 0.0,
    };
    snapshot::save(&snap, &dir, "data")?;
    Ok(Outcome {
        artifacts: vec![dir.join("data.kdv"), dir.join("data.csv")],
        summary: vec![format!(
            "{} on {} modes, L2 norm {:.6e}",
            cfg.data,
            cfg.n_modes,
            snap.field.l2_norm()
        )],
    })
}

#[derive(Serialize)]
struct EvolveSummary<'a> {
    config: &'a EvolveConfig,
    n_modes: usize,
    time: f64,
    l2_norm_initial: f64,
    l2_norm_final: f64,
    mean_final: f64,
}

fn run_evolve(cmd: Command, opts: &CommonOpts) -> Result<Outcome, CliError> {
    let mut cfg: EvolveConfig = config::load(config_path(opts)?)?;
    if let Some(&s) = opts.seed_override.first() {
        cfg.seed = s;
    }
    if cmd == Command::Step && cfg.steps != 1 {
        return Err(CliError::config(Some("steps"), "`step` runs exactly one step; use `evolve`"));
    }
    cfg.validate()?;
    let (u0, t0) = match (&cfg.data, &cfg.input) {
        (Some(data), _) => (data.sample(config::grid(cfg.n_modes.expect("validated"))?, cfg.seed)?, 0.0),
        (None, Some(path)) => {
            let snap = snapshot::load(path)?;
            if let Some(n) = cfg.n_modes {
                if n != snap.field.grid().n_modes() {
                    return Err(CliError::config(
                        Some("n_modes"),
                        format!("snapshot has {} modes", snap.field.grid().n_modes()),
                    ));
                }
            }
            (snap.field, snap.time)
        }
        (None, None) => unreachable!("validated"),
    };
    let mut ctx = StepContext::with_filter(cfg.tau, u0.grid(), cfg.filter.into())?;
    if cfg.linear_only {
        ctx = ctx.without_nonlinearity();
    }
    if opts.check {
        return Ok(Outcome {
            summary: vec!["config ok".into()],
            ..Outcome::default()
        });
    }
    let dir = out_dir(opts, &cfg.output);
    create_dir(&dir)?;

    let mut snaps: Vec<(usize, SpectralField)> = Vec::new();
    let every = cfg.snapshot_every;
    let mut record = |n: usize, u: &SpectralField| {
        if every > 0 && n % every == 0 {
            snaps.push((n, u.clone()));
        }
    };
    let mut observers: [Observer<'_>; 1] = [&mut record];
    let result = evolve(&ctx, cfg.scheme, &u0, cfg.steps, &mut observers);
    let mut artifacts = Vec::new();
    for (n, u) in snaps {
        let stem = format!("snapshot_{n:08}");
        snapshot::save(
            &Snapshot {
                field: u,
                tau: cfg.tau,
                time: t0 + n as f64 * cfg.tau,
            },
            &dir,
            &stem,
        )?;
        artifacts.push(dir.join(format!("{stem}.kdv")));
    }
    let u = result?;
    let stem = if cmd == Command::Step { "step" } else { "final" };
    let time = t0 + cfg.steps as f64 * cfg.tau;
    let summary = EvolveSummary {
        config: &cfg,
        n_modes: u.grid().n_modes(),
        time,
        l2_norm_initial: u0.l2_norm(),
        l2_norm_final: u.l2_norm(),
        mean_final: u.mean(),
    };
    let json = dir.join(format!("{stem}.json"));
    write_json(&json, &summary)?;
    let line = format!(
        "{} x {} at tau {:e}: t = {time}, L2 {:.6e} -> {:.6e}",
        cfg.steps,
        cfg.scheme,
        cfg.tau,
        summary.l2_norm_initial,
        summary.l2_norm_final
    );
    snapshot::save(
        &Snapshot {
            field: u,
            tau: cfg.tau,
            time,
        },
        &dir,
        stem,
    )?;
    artifacts.extend([dir.join(format!("{stem}.kdv")), dir.join(format!("{stem}.csv")), json]);
    Ok(Outcome {
        artifacts,
        summary: vec![line],
    })
}
