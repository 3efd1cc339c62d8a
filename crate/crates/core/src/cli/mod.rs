//! Command-line front end: `semispec <analyze|spectrum|pseudospectrum|classify|predict>`.

mod config;
mod output;
mod pipeline;

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::Error;
use crate::predict::predict_string;
use crate::quadratics::{classify_range, positivity_direction, range_ellipse, select_mu, RangeClass};
use crate::symbols::{sample_range, PolySymbol};

pub use config::{resolve_out_dir, BasisConfig, RunConfig, OUT_ENV};
pub use output::{eigenvalue_csv, figure_svg, to_json, write_report, CSV_HEADER};
pub use pipeline::{
    analyze, compute_cloud, disc_table, find_targets, ConeCheckReport, ConePointReport, ConeStatus,
    CriticalPointReport, EigenvalueEntry, Focus, RunEntry, RunReport, Target,
};

/// JSON schema for `report.json`.
pub const REPORT_SCHEMA: &str = include_str!("../../schema/report.v1.json");

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(Error),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("no nondegenerate real critical point with a positivity direction in the search box")]
    NoCriticalPoint,
    #[error("eigensolver failed: {0}")]
    Eigensolver(Error),
    #[error("exterior cone check failed")]
    ConeCheckFailed,
    #[error("{0}")]
    Library(Error),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) | CliError::Config(_) => 2,
            CliError::NoCriticalPoint => 3,
            CliError::Eigensolver(_) => 4,
            CliError::ConeCheckFailed => 5,
            CliError::Library(_) | CliError::Io(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "semispec", version, about = "Eigenvalue strings at boundary critical values of non-normal semiclassical operators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Full pipeline: critical points, prediction, spectra, fit, report.
    Analyze(AnalyzeArgs),
    /// Trust-filtered eigenvalues of the discretized operator.
    Spectrum(SpectrumArgs),
    /// Sampled range of the symbol over a real box.
    Pseudospectrum(PseudospectrumArgs),
    /// Range class of the quadratic part of the symbol at a point.
    Classify(ClassifyArgs),
    /// Predicted eigenvalue string from z0 and mu.
    Predict(PredictArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Symbol p(x, xi), e.g. "xi^2+(1+3i)*x^2+x^4".
    #[arg(long)]
    pub symbol: Option<String>,
    /// Semiclassical parameters, strictly decreasing.
    #[arg(long, value_delimiter = ',')]
    pub h: Vec<f64>,
    /// hermite[:N[:PARTNER]] or chebyshev[[:L]:N]; repeatable.
    #[arg(long, value_delimiter = ',')]
    pub basis: Vec<BasisConfig>,
    #[arg(long)]
    pub disc_radius: Option<f64>,
    #[arg(long)]
    pub k_use: Option<usize>,
    /// Output directory (overrides SEMISPEC_OUT and the config file).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Treat a failed exterior cone check as an error.
    #[arg(long)]
    pub strict: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    /// JSON RunConfig; flags given on the command line take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub symbol: String,
    #[arg(long, value_delimiter = ',', required = true)]
    pub h: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub basis: Vec<BasisConfig>,
    #[arg(long, default_value_t = crate::linalg::DEFAULT_MATCH_TOL)]
    pub match_tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PseudospectrumArgs {
    #[arg(long)]
    pub symbol: String,
    #[arg(long = "box", default_value_t = 4.0)]
    pub box_halfwidth: f64,
    #[arg(long, default_value_t = 0.02)]
    pub step: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub symbol: String,
    /// Point "x,xi" at which the Hessian is taken.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [0.0, 0.0])]
    pub at: Vec<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Critical value, as a constant expression such as "0" or "1-0.5i".
    /// Defaults to the critical value found with --mu-from-symbol.
    #[arg(long)]
    pub z0: Option<String>,
    /// mu as a constant expression.
    #[arg(long, conflicts_with = "mu_from_symbol")]
    pub mu: Option<String>,
    /// Take mu (and z0) from the first analysable critical point of a symbol.
    #[arg(long)]
    pub mu_from_symbol: Option<String>,
    #[arg(long)]
    pub h: f64,
    /// Largest index k of the string.
    #[arg(long, default_value_t = 9)]
    pub k: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

const DEFAULT_OUT: &str = "semispec-out";

fn out_dir(flag: &Option<PathBuf>) -> PathBuf {
    resolve_out_dir(flag.as_deref(), &PathBuf::from(DEFAULT_OUT))
}

/// Constant expression such as `1-0.5i`, reusing the symbol grammar.
fn parse_constant(text: &str) -> Result<Complex64, CliError> {
    let p = pipeline::parse(text)?;
    if p.degree() > 0 {
        return Err(CliError::Config(format!("'{text}' is not a constant")));
    }
    Ok(p.coeff(0, 0))
}

pub fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Analyze(a) => run_analyze(a),
        Command::Spectrum(a) => run_spectrum(a),
        Command::Pseudospectrum(a) => run_pseudospectrum(a),
        Command::Classify(a) => run_classify(a),
        Command::Predict(a) => run_predict(a),
    }
}

fn analyze_config(a: &AnalyzeArgs) -> Result<RunConfig, CliError> {
    let mut config = match (&a.config, &a.symbol) {
        (Some(path), _) => RunConfig::from_file(path)?,
        (None, Some(symbol)) => RunConfig::new(symbol.clone(), Vec::new()),
        (None, None) => return Err(CliError::Config("either --symbol or --config is required".into())),
    };
    if let Some(symbol) = &a.symbol {
        config.symbol_text = symbol.clone();
    }
    if !a.h.is_empty() {
        config.h_list = a.h.clone();
    }
    if !a.basis.is_empty() {
        config.basis = a.basis.clone();
    }
    if let Some(r) = a.disc_radius {
        config.disc_radius = r;
    }
    if let Some(k) = a.k_use {
        config.k_use = k;
    }
    if let Some(seed) = a.seed {
        config.seed = seed;
    }
    config.strict |= a.strict;
    config.out_dir = resolve_out_dir(a.out.as_deref(), &config.out_dir);
    Ok(config)
}

fn run_analyze(a: AnalyzeArgs) -> Result<String, CliError> {
    let config = analyze_config(&a)?;
    let report = analyze(&config)?;
    write_report(&config.out_dir, &report, config.disc_radius)?;

    let mut summary = String::new();
    for cp in &report.critical_points {
        writeln!(
            summary,
            "critical point ({}, {}): z0 = {} {:+}i, predicted direction {:.6} rad (slope {:.6})",
            cp.x,
            cp.xi,
            cp.z0[0],
            cp.z0[1],
            cp.direction_rad,
            cp.direction_rad.tan()
        )
        .unwrap();
    }
    for run in &report.runs {
        let trusted = run.eigenvalues.iter().filter(|e| e.trusted).count();
        let fitted = run.fitted_direction_rad.map_or("n/a".to_string(), |f| format!("{f:.6}"));
        let err = run.angle_error_rad.map_or("n/a".to_string(), |e| format!("{e:.2e}"));
        writeln!(
            summary,
            "h={} {} N={}: {trusted} trusted in disc, fitted direction {fitted}, angle error {err}",
            run.h, run.basis, run.n
        )
        .unwrap();
    }
    writeln!(summary, "cone check: {:?}", report.cone_check.status).unwrap();
    writeln!(summary, "wrote {}", config.out_dir.display()).unwrap();

    match report.cone_check.status {
        ConeStatus::Fail if config.strict => {
            eprint!("{summary}");
            Err(CliError::ConeCheckFailed)
        }
        ConeStatus::Fail => {
            log::warn!("exterior cone check failed (use --strict to make this an error)");
            Ok(summary)
        }
        _ => Ok(summary),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRun {
    pub h: f64,
    pub basis: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub eigenvalues: Vec<EigenvalueEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub symbol: String,
    pub runs: Vec<SpectrumRun>,
}

fn run_spectrum(a: SpectrumArgs) -> Result<String, CliError> {
    let p = pipeline::parse(&a.symbol)?;
    let mut config = RunConfig::new(a.symbol.clone(), a.h.clone());
    if !a.basis.is_empty() {
        config.basis = a.basis.clone();
    }
    config.match_tol = a.match_tol;
    config.validate()?;
    let dir = out_dir(&a.out);

    use rayon::prelude::*;
    let jobs: Vec<(f64, BasisConfig)> =
        config.h_list.iter().flat_map(|&h| config.basis.iter().map(move |b| (h, *b))).collect();
    let runs = jobs
        .par_iter()
        .map(|&(h, basis)| -> Result<SpectrumRun, CliError> {
            let (cloud, n) = compute_cloud(&p, h, &basis, config.match_tol, None, config.max_chebyshev_n)?;
            Ok(SpectrumRun {
                h,
                basis: basis.name().into(),
                n,
                eigenvalues: disc_table(&cloud, Complex64::new(0.0, 0.0), f64::INFINITY),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let report = SpectrumReport { symbol: a.symbol, runs };

    output::ensure_dir(&dir)?;
    output::write_text(&dir.join("spectrum.json"), &to_json(&report))?;
    let mut summary = String::new();
    for run in &report.runs {
        let name = format!("spectrum_{}_N{}_h{}.csv", run.basis, run.n, run.h);
        output::write_text(&dir.join(&name), &eigenvalue_csv(run.h, &run.eigenvalues))?;
        writeln!(summary, "h={} {} N={}: smallest trusted eigenvalues", run.h, run.basis, run.n).unwrap();
        for e in run.eigenvalues.iter().filter(|e| e.trusted).take(5) {
            writeln!(summary, "  {} {:+}i", e.re, e.im).unwrap();
        }
    }
    writeln!(summary, "wrote {}", dir.display()).unwrap();
    Ok(summary)
}

fn run_pseudospectrum(a: PseudospectrumArgs) -> Result<String, CliError> {
    let p = pipeline::parse(&a.symbol)?;
    let sample = sample_range(&p, a.box_halfwidth, a.step).map_err(CliError::Library)?;
    let dir = out_dir(&a.out);
    let mut csv = String::from("x,xi,re,im\n");
    for (i, v) in sample.values.iter().enumerate() {
        let (x, xi) = sample.node(i);
        writeln!(csv, "{x},{xi},{},{}", v.re, v.im).unwrap();
    }
    output::ensure_dir(&dir)?;
    output::write_text(&dir.join("pseudospectrum.csv"), &csv)?;
    Ok(format!("sampled {} points; wrote {}\n", sample.values.len(), dir.display()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyReport {
    pub symbol: String,
    pub at: [f64; 2],
    pub hessian: [[f64; 2]; 3],
    pub range_class: RangeClass,
    pub ellipse: EllipseReport,
    pub alpha: Option<[f64; 2]>,
    pub mu: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EllipseReport {
    pub center: [f64; 2],
    pub u: [f64; 2],
    pub v: [f64; 2],
}

fn run_classify(a: ClassifyArgs) -> Result<String, CliError> {
    let p: PolySymbol = pipeline::parse(&a.symbol)?;
    let &[x, xi] = a.at.as_slice() else {
        return Err(CliError::Config(format!("--at expects \"x,xi\", got {} values", a.at.len())));
    };
    let q = p.hessian_at(x, xi);
    let range_class = classify_range(&q).map_err(CliError::Library)?;
    let e = range_ellipse(&q);
    let cert = positivity_direction(&q);
    let mu = cert.as_ref().and_then(|c| select_mu(&q, c).ok());
    let report = ClassifyReport {
        symbol: a.symbol,
        at: [x, xi],
        hessian: [pipeline::pair(q.hxx), pipeline::pair(q.hxxi), pipeline::pair(q.hxixi)],
        range_class,
        ellipse: EllipseReport {
            center: pipeline::pair(e.center),
            u: pipeline::pair(e.u),
            v: pipeline::pair(e.v),
        },
        alpha: cert.map(|c| pipeline::pair(c.alpha)),
        mu: mu.map(pipeline::pair),
    };
    let json = to_json(&report);
    let dir = out_dir(&a.out);
    output::ensure_dir(&dir)?;
    output::write_text(&dir.join("classify.json"), &json)?;
    Ok(json)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictReport {
    pub z0: [f64; 2],
    pub mu: [f64; 2],
    pub direction_rad: f64,
    pub h: f64,
    pub string: Vec<[f64; 2]>,
}

fn run_predict(a: PredictArgs) -> Result<String, CliError> {
    let (mu, default_z0) = match (&a.mu, &a.mu_from_symbol) {
        (Some(m), _) => (parse_constant(m)?, None),
        (None, Some(symbol)) => {
            let p = pipeline::parse(symbol)?;
            let targets = find_targets(&p, 4.0, 32)?;
            let t = targets.first().ok_or(CliError::NoCriticalPoint)?;
            (t.mu, Some(t.z0))
        }
        (None, None) => return Err(CliError::Config("one of --mu or --mu-from-symbol is required".into())),
    };
    let z0 = match (&a.z0, default_z0) {
        (Some(text), _) => parse_constant(text)?,
        (None, Some(z)) => z,
        (None, None) => Complex64::new(0.0, 0.0),
    };
    let prediction = predict_string(z0, mu, a.h, a.k).map_err(|e| CliError::Config(e.to_string()))?;
    let report = PredictReport {
        z0: pipeline::pair(prediction.z0),
        mu: pipeline::pair(prediction.mu),
        direction_rad: prediction.direction,
        h: prediction.h,
        string: prediction.string.iter().map(|&z| pipeline::pair(z)).collect(),
    };
    let json = to_json(&report);
    let dir = out_dir(&a.out);
    output::ensure_dir(&dir)?;
    output::write_text(&dir.join("predict.json"), &json)?;
    Ok(json)
}
