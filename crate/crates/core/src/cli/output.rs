use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;

use super::pipeline::{EigenvalueEntry, RunReport};
use super::CliError;

pub const CSV_HEADER: &str = "h,k,re,im,trusted";

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| io_err(path, e))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

/// Eigenvalue table in the fixed column layout; floats use the shortest
/// representation that round-trips.
pub fn eigenvalue_csv(h: f64, eigenvalues: &[EigenvalueEntry]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for (k, e) in eigenvalues.iter().enumerate() {
        writeln!(out, "{h},{k},{},{},{}", e.re, e.im, e.trusted).unwrap();
    }
    out
}

pub fn eigenvalue_csv_name(basis: &str, n: usize, h: f64) -> String {
    format!("eigenvalues_{basis}_N{n}_h{h}.csv")
}

/// Writes `report.json`, one CSV per run and `figure.svg`; returns the
/// paths written.
pub fn write_report(dir: &Path, report: &RunReport, disc_radius: f64) -> Result<Vec<PathBuf>, CliError> {
    ensure_dir(dir)?;
    let mut written = Vec::new();
    let json = dir.join("report.json");
    write_text(&json, &to_json(report))?;
    written.push(json);
    for run in &report.runs {
        let path = dir.join(eigenvalue_csv_name(&run.basis, run.n, run.h));
        write_text(&path, &eigenvalue_csv(run.h, &run.eigenvalues))?;
        written.push(path);
    }
    let svg = dir.join("figure.svg");
    write_text(&svg, &figure_svg(report, disc_radius))?;
    written.push(svg);
    Ok(written)
}

const SIZE: f64 = 640.0;
const PAD: f64 = 40.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Scatter of trusted eigenvalues inside the disc around the first critical
/// value, with the predicted ray from every critical value.
pub fn figure_svg(report: &RunReport, disc_radius: f64) -> String {
    let center = report
        .critical_points
        .first()
        .map_or(Complex64::new(0.0, 0.0), |c| Complex64::new(c.z0[0], c.z0[1]));
    let half = disc_radius * 1.1;
    let scale = (SIZE - 2.0 * PAD) / (2.0 * half);
    let map = |z: Complex64| {
        (PAD + (z.re - center.re + half) * scale, PAD + (center.im + half - z.im) * scale)
    };

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    let (cx, cy) = map(center);
    writeln!(
        s,
        r##"<circle class="disc" cx="{cx:.3}" cy="{cy:.3}" r="{:.3}" fill="none" stroke="#bbbbbb" stroke-dasharray="4 4"/>"##,
        disc_radius * scale
    )
    .unwrap();
    writeln!(
        s,
        r##"<text x="{PAD}" y="{:.0}" font-family="sans-serif" font-size="12">{}</text>"##,
        PAD / 2.0,
        escape(&report.symbol)
    )
    .unwrap();

    for cp in &report.critical_points {
        let z0 = Complex64::new(cp.z0[0], cp.z0[1]);
        let end = z0 + Complex64::from_polar(disc_radius, cp.direction_rad);
        let (x1, y1) = map(z0);
        let (x2, y2) = map(end);
        writeln!(
            s,
            r##"<line class="ray" x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="black" stroke-width="1.5"><title>direction {} rad</title></line>"##,
            cp.direction_rad
        )
        .unwrap();
    }

    for (i, run) in report.runs.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        for e in run.eigenvalues.iter().filter(|e| e.trusted) {
            let (x, y) = map(Complex64::new(e.re, e.im));
            writeln!(
                s,
                r#"<circle class="eigenvalue" cx="{x:.3}" cy="{y:.3}" r="3" fill="{colour}"><title>h={} {}</title></circle>"#,
                run.h, run.basis
            )
            .unwrap();
        }
    }
    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
