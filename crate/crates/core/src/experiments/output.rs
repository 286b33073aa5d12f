use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use super::studies::{median, PointStatus, StudyReport};
use crate::error::Result;

pub const CSV_HEADER: &str = "scheme,s0,seed,n_modes,tau,T,error_l2,status";

fn s0_field(s0: f64) -> String {
    if s0.is_infinite() {
        "inf".into()
    } else {
        format!("{s0}")
    }
}

/// One line per measured point, in job-key order.
pub fn write_csv<W: Write>(report: &StudyReport, mut w: W) -> io::Result<()> {
    let cfg = &report.config;
    let s0 = s0_field(cfg.data.s0());
    writeln!(w, "{CSV_HEADER}")?;
    for r in &report.rows {
        let err = r.error.map_or_else(|| "nan".to_string(), |e| format!("{e:e}"));
        writeln!(
            w,
            "{},{},{},{},{:e},{},{},{}",
            r.label,
            s0,
            r.seed,
            cfg.n_modes,
            r.tau,
            r.time,
            err,
            r.status.name()
        )?;
    }
    Ok(())
}

/// The full report (config echo, reference checks, fits) as pretty JSON.
pub fn write_json<W: Write>(report: &StudyReport, w: W) -> io::Result<()> {
    serde_json::to_writer_pretty(w, report).map_err(io::Error::other)
}

const W: f64 = 640.0;
const H: f64 = 440.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Log-log plot of the median (over seeds) error per label against `τ`.
pub fn render_svg(report: &StudyReport) -> String {
    let mut series: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for s in &report.summary {
        let pts: Vec<(f64, f64)> = report
            .config
            .tau_ladder
            .iter()
            .filter_map(|&tau| {
                let errs: Vec<f64> = report
                    .rows
                    .iter()
                    .filter(|r| r.label == s.label && r.tau == tau)
                    .filter(|r| r.status != PointStatus::BlowUp)
                    .filter_map(|r| r.error)
                    .filter(|e| *e > 0.0)
                    .collect();
                median(&errs).map(|e| (tau.log10(), e.log10()))
            })
            .collect();
        series.push((s.label.clone(), pts));
    }
    let all = series.iter().flat_map(|s| s.1.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x0 > x1 {
        (x0, x1, y0, y1) = (-1.0, 0.0, -1.0, 0.0);
    }
    let (x0, x1) = (x0.floor(), x1.ceil().max(x0.floor() + 1.0));
    let (y0, y1) = (y0.floor(), y1.ceil().max(y0.floor() + 1.0));
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
    let py = |y: f64| H - MARGIN - (y - y0) / (y1 - y0) * (H - 2.0 * MARGIN);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="20" text-anchor="middle">{}</text>"#,
        W / 2.0,
        report.study
    );
    for d in (x0 as i32)..=(x1 as i32) {
        let x = px(d as f64);
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.1}" y1="{MARGIN}" x2="{x:.1}" y2="{}" stroke="#ddd"/><text x="{x:.1}" y="{}" text-anchor="middle">1e{d}</text>"##,
            H - MARGIN,
            H - MARGIN + 18.0
        );
    }
    for d in (y0 as i32)..=(y1 as i32) {
        let y = py(d as f64);
        let _ = writeln!(
            svg,
            r##"<line x1="{MARGIN}" y1="{y:.1}" x2="{}" y2="{y:.1}" stroke="#ddd"/><text x="{}" y="{:.1}" text-anchor="end">1e{d}</text>"##,
            W - MARGIN,
            MARGIN - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">tau</text>"#,
        W / 2.0,
        H - 15.0
    );
    for (i, (label, pts)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let path: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{:.1},{:.1}", px(x), py(y)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            path.join(" ")
        );
        for &(x, y) in pts {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="{color}"/>"#,
                px(x),
                py(y)
            );
        }
        let slope = report
            .median_slope(label)
            .map_or_else(|| "n/a".to_string(), |s| format!("{s:.3}"));
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" fill="{color}">{label} (slope {slope})</text>"#,
            MARGIN + 10.0,
            MARGIN + 16.0 * (i as f64 + 1.0)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Writes `<study>.csv`, `<study>.json` and optionally `<study>.svg` into `dir`.
pub fn write_report(report: &StudyReport, dir: &Path, plot: bool) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let stem = report.study.name();
    let csv = dir.join(format!("{stem}.csv"));
    let json = dir.join(format!("{stem}.json"));
    let mut f = io::BufWriter::new(fs::File::create(&csv)?);
    write_csv(report, &mut f)?;
    f.flush()?;
    let mut f = io::BufWriter::new(fs::File::create(&json)?);
    write_json(report, &mut f)?;
    writeln!(f)?;
    f.flush()?;
    let mut paths = vec![csv, json];
    if plot {
        let svg = dir.join(format!("{stem}.svg"));
        fs::write(&svg, render_svg(report))?;
        paths.push(svg);
    }
    Ok(paths)
}
