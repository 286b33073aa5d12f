//! Reference flows, rate studies and their on-disk reports.
//!
//! Studies fan out over `(scheme, seed, τ)` jobs on a bounded worker pool and
//! reassemble results by job key, so reports never depend on `jobs`.

mod config;
mod fit;
mod output;
mod reference;
mod studies;

pub use config::{ExperimentConfig, InitialData, ReferencePolicy};
pub use fit::{rate_fit, RateFit};
pub use output::{render_svg, write_csv, write_json, write_report, CSV_HEADER};
pub use reference::{
    reference_solve, reference_trajectory, resonance_trajectory, richardson, ReferenceCheck,
    ReferenceFlow, ReferenceRun,
};
pub use studies::{
    convergence_study, local_error_study, median, projection_gap_study, run_jobs,
    ConvergenceReport, ErrorRow, LabelSummary, PointStatus, SeriesFit, StudyKind, StudyReport,
};
