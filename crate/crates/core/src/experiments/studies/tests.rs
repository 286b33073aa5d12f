use super::*;
use crate::experiments::{write_csv, InitialData};

fn cfg(data: InitialData, n_modes: usize, lo: i32, hi: i32, tau_ref: i32) -> ExperimentConfig {
    ExperimentConfig::new(
        Scheme::CLOSED_FORMS.to_vec(),
        ExperimentConfig::dyadic_ladder(lo, hi),
        data,
        n_modes,
        2f64.powi(-tau_ref),
    )
}

fn csv(report: &StudyReport) -> String {
    let mut buf = Vec::new();
    write_csv(report, &mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}

#[test]
fn smooth_convergence_is_first_order() {
    let c = cfg(InitialData::Cosine, 64, 5, 9, 13);
    let report = convergence_study(&c).unwrap();
    assert_eq!(report.rows.len(), 15);
    assert!(report.references.iter().all(|r| r.accepted), "{:?}", report.references);
    for s in &Scheme::CLOSED_FORMS {
        let slope = report.median_slope(s.name()).unwrap();
        assert!((slope - 1.0).abs() < 0.1, "{s}: {slope}");
    }
    // weak monotonicity inside the window
    for s in &Scheme::CLOSED_FORMS {
        let errs: Vec<f64> = report
            .rows
            .iter()
            .filter(|r| r.label == s.name())
            .map(|r| r.error.unwrap())
            .collect();
        for w in errs[2..].windows(2) {
            assert!(w[1] <= 1.05 * w[0]);
        }
    }
}

#[test]
fn single_step_size_gives_errors_without_slope() {
    let c = cfg(InitialData::Cosine, 64, 6, 6, 10);
    let report = convergence_study(&c).unwrap();
    assert_eq!(report.rows.len(), 3);
    assert!(report.rows.iter().all(|r| r.error.unwrap() > 0.0));
    assert!(report.fits.iter().all(|f| f.fit.is_none()));
    assert!(report.summary.iter().all(|s| s.median_slope.is_none()));
}

#[test]
fn linear_runs_are_exact() {
    let mut c = cfg(InitialData::TwoMode, 64, 4, 6, 10);
    c.linear_only = true;
    let report = convergence_study(&c).unwrap();
    for r in &report.rows {
        assert!(r.error.unwrap() < 1e-12, "{r:?}");
    }
    let local = local_error_study(&c).unwrap();
    for r in &local.rows {
        assert!(r.error.unwrap() <= 1e-13, "{r:?}");
    }
    let gap = projection_gap_study(&{
        let mut g = c.clone();
        g.gap_samples = 4;
        g
    })
    .unwrap();
    for r in &gap.rows {
        assert!(r.error.unwrap() < 1e-12, "{r:?}");
    }
}

#[test]
fn smooth_local_error_is_second_order() {
    let c = cfg(InitialData::TwoMode, 64, 5, 11, 15);
    let report = local_error_study(&c).unwrap();
    for s in &Scheme::CLOSED_FORMS {
        let slope = report.median_slope(s.name()).unwrap();
        assert!((slope - 2.0).abs() < 0.3, "{s}: {slope}");
    }
}

#[test]
fn parallelism_does_not_change_output() {
    let mut c = cfg(
        InitialData::Rough {
            s0: 1.0,
            margin: 0.01,
            normalize_to: 1.0,
        },
        64,
        5,
        7,
        12,
    );
    c.seeds = vec![4, 5];
    let serial = convergence_study(&c).unwrap();
    c.jobs = 3;
    let parallel = convergence_study(&c).unwrap();
    assert_eq!(csv(&serial), csv(&parallel));
    c.gap_samples = 4;
    let a = projection_gap_study(&c).unwrap();
    c.jobs = 1;
    let b = projection_gap_study(&c).unwrap();
    assert_eq!(csv(&a), csv(&b));
}

#[test]
fn rejected_reference_keeps_errors_but_drops_fit() {
    // a coarse reference cannot certify errors of the finer schemes
    let mut c = cfg(InitialData::Cosine, 64, 5, 9, 13);
    c.reference.tolerance = 1e-9;
    let report = convergence_study(&c).unwrap();
    assert!(!report.references[0].accepted);
    assert!(report
        .rows
        .iter()
        .all(|r| r.status == PointStatus::ReferenceRejected && r.error.is_some()));
    assert!(report.summary.iter().all(|s| s.median_slope.is_none()));
    assert!(csv(&report).contains(",reference_rejected\n"));
}

#[test]
fn csv_layout() {
    let c = cfg(InitialData::Cosine, 64, 6, 6, 10);
    let text = csv(&convergence_study(&c).unwrap());
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), crate::experiments::CSV_HEADER);
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "exp_integrator");
    assert_eq!(first[1], "inf");
    assert_eq!(first[3], "64");
    assert_eq!(first[4], "1.5625e-2");
    assert_eq!(first[5], "1");
    assert_eq!(first[7], "ok");
}

#[test]
fn median_of_even_and_odd() {
    assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
    assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
    assert_eq!(median(&[]), None);
}
