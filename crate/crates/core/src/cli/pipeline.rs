use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{BasisConfig, RunConfig};
use super::CliError;
use crate::error::Error;
use crate::linalg::{eigenvalues_dense, filter_trusted, EigenvalueCloud};
use crate::predict::{fit_direction, wrap_mod_pi};
use crate::quadratics::{classify_range, positivity_direction, select_mu, RangeClass};
use crate::quantize::{chebyshev_schrodinger, weyl_quantize_hermite, ChebyshevGridSpec, HermiteBasisSpec};
use crate::symbols::{
    exterior_cone_check, find_real_critical_points, parse_symbol, sample_range, ConeSpec, PolySymbol,
};

const I: Complex64 = Complex64::new(0.0, 1.0);
/// Chebyshev runs are refined until trusted values move less than this.
const CHEBYSHEV_STABILITY: f64 = 1e-8;

pub fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalPointReport {
    pub x: f64,
    pub xi: f64,
    pub z0: [f64; 2],
    pub mu: [f64; 2],
    pub alpha: [f64; 2],
    pub direction_rad: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueEntry {
    pub re: f64,
    pub im: f64,
    pub trusted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunEntry {
    pub h: f64,
    pub basis: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub eigenvalues: Vec<EigenvalueEntry>,
    pub fitted_direction_rad: Option<f64>,
    pub predicted_direction_rad: f64,
    pub angle_error_rad: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConeStatus {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeCheckReport {
    pub status: ConeStatus,
    /// One entry per reported critical point, in the same order.
    pub per_point: Vec<ConePointReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConePointReport {
    pub status: ConeStatus,
    pub theta0: f64,
    pub eps0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub symbol: String,
    pub critical_points: Vec<CriticalPointReport>,
    pub range_class: RangeClass,
    pub runs: Vec<RunEntry>,
    pub cone_check: ConeCheckReport,
}

/// A critical point that can be analysed: nondegenerate, with a positivity
/// certificate and a selected `mu`.
#[derive(Debug, Clone, PartialEq)]
pub struct Target {
    pub location: (f64, f64),
    pub z0: Complex64,
    pub mu: Complex64,
    pub alpha: Complex64,
    pub range_class: RangeClass,
}

impl Target {
    pub fn direction(&self) -> f64 {
        (self.mu / I).arg()
    }

    fn report(&self) -> CriticalPointReport {
        CriticalPointReport {
            x: self.location.0,
            xi: self.location.1,
            z0: pair(self.z0),
            mu: pair(self.mu),
            alpha: pair(self.alpha),
            direction_rad: self.direction(),
        }
    }
}

pub fn parse(text: &str) -> Result<PolySymbol, CliError> {
    parse_symbol(text).map_err(CliError::Parse)
}

/// Nondegenerate real critical points in the box that admit a positivity
/// certificate, with their `mu`, sorted by location.
pub fn find_targets(p: &PolySymbol, box_halfwidth: f64, seeds: usize) -> Result<Vec<Target>, CliError> {
    let points = find_real_critical_points(p, box_halfwidth, seeds).map_err(CliError::Library)?;
    let mut out = Vec::new();
    for cp in points.iter().filter(|c| c.nondegenerate) {
        let Some(cert) = positivity_direction(&cp.hessian) else {
            log::warn!("critical point {:?} has no positivity direction; skipped", cp.location);
            continue;
        };
        let mu = match select_mu(&cp.hessian, &cert) {
            Ok(mu) => mu,
            Err(e) => {
                log::warn!("critical point {:?}: {e}; skipped", cp.location);
                continue;
            }
        };
        let range_class = classify_range(&cp.hessian).map_err(CliError::Library)?;
        out.push(Target { location: cp.location, z0: cp.value, mu, alpha: cert.alpha, range_class });
    }
    Ok(out)
}

fn solve(m: &crate::linalg::CMatrix) -> Result<Vec<Complex64>, CliError> {
    eigenvalues_dense(m).map_err(|e| match e {
        Error::NoConvergence { .. } => CliError::Eigensolver(e),
        other => CliError::Library(other),
    })
}

/// Stability requirements for Chebyshev refinement.
#[derive(Debug, Clone, Copy)]
pub struct Focus {
    pub center: Complex64,
    pub radius: f64,
    pub k_use: usize,
}

/// Eigenvalues at the base resolution, trust-flagged against the partner
/// resolution. Returns the cloud and the base dimension actually used.
pub fn compute_cloud(
    p: &PolySymbol,
    h: f64,
    basis: &BasisConfig,
    tol: f64,
    focus: Option<Focus>,
    max_chebyshev_n: usize,
) -> Result<(EigenvalueCloud, usize), CliError> {
    match *basis {
        BasisConfig::Hermite { n, partner_n } => {
            let partner = partner_n.unwrap_or(2 * n);
            let (low, high) = rayon::join(
                || -> Result<_, CliError> {
                    let spec = HermiteBasisSpec::for_symbol(h, n, p).map_err(CliError::Library)?;
                    solve(&weyl_quantize_hermite(p, &spec).map_err(CliError::Library)?.entries)
                },
                || -> Result<_, CliError> {
                    let spec = HermiteBasisSpec::for_symbol(h, partner, p).map_err(CliError::Library)?;
                    solve(&weyl_quantize_hermite(p, &spec).map_err(CliError::Library)?.entries)
                },
            );
            Ok((filter_trusted(&low?, &high?, h, tol), n))
        }
        BasisConfig::Chebyshev { l, n } => {
            let cheb = |n: usize| -> Result<Vec<Complex64>, CliError> {
                let grid = ChebyshevGridSpec::new(l, n, h).map_err(CliError::Library)?;
                solve(&chebyshev_schrodinger(p, &grid).map_err(CliError::Library)?.entries)
            };
            let mut n = n;
            let mut low = cheb(n)?;
            loop {
                let high = cheb(2 * n)?;
                let cloud = filter_trusted(&low, &high, h, tol);
                let settled = match focus {
                    None => true,
                    Some(f) => {
                        let near = cloud.restrict_to_disc(f.center, f.radius);
                        let moving = near.shifts.iter().flatten().any(|&d| d > CHEBYSHEV_STABILITY);
                        !moving && near.trusted_count() >= f.k_use
                    }
                };
                if settled || 2 * n > max_chebyshev_n {
                    if !settled {
                        log::warn!("chebyshev L={l}: values near the target still unstable at N={n}");
                    }
                    return Ok((cloud, n));
                }
                log::info!("chebyshev L={l}: refining N={n} -> {}", 2 * n);
                n *= 2;
                low = high;
            }
        }
    }
}

fn cone_check(p: &PolySymbol, targets: &[Target], config: &RunConfig) -> Result<ConeCheckReport, CliError> {
    let sample = sample_range(p, config.box_halfwidth, config.grid_step).map_err(CliError::Library)?;
    let mut per_point = Vec::new();
    for t in targets {
        let theta0 = match t.range_class {
            RangeClass::ProperCone { bisector, .. } => bisector + std::f64::consts::PI,
            // a full-plane quadratic part admits no exterior cone; probe anyway
            RangeClass::FullPlane { .. } => t.direction() + std::f64::consts::PI,
        };
        let cone = ConeSpec::new(theta0, config.cone_eps0).map_err(CliError::Library)?;
        let status = match exterior_cone_check(&sample, t.z0, cone, config.cone_margin) {
            Ok(true) => ConeStatus::Pass,
            Ok(false) => ConeStatus::Fail,
            Err(Error::ConeInconclusive { point }) => {
                log::warn!("cone check at z0={} inconclusive near {point}", t.z0);
                ConeStatus::Inconclusive
            }
            Err(e) => return Err(CliError::Library(e)),
        };
        per_point.push(ConePointReport { status, theta0: cone.theta0(), eps0: cone.eps0() });
    }
    let status = if per_point.iter().any(|c| c.status == ConeStatus::Fail) {
        ConeStatus::Fail
    } else if per_point.iter().all(|c| c.status == ConeStatus::Pass) {
        ConeStatus::Pass
    } else {
        ConeStatus::Inconclusive
    };
    Ok(ConeCheckReport { status, per_point })
}

/// Eigenvalue table for a run: values within the disc, nearest first.
pub fn disc_table(cloud: &EigenvalueCloud, center: Complex64, radius: f64) -> Vec<EigenvalueEntry> {
    let near = cloud.restrict_to_disc(center, radius).sorted_by_distance(center);
    near.values
        .iter()
        .zip(&near.trusted)
        .map(|(z, &trusted)| EigenvalueEntry { re: z.re, im: z.im, trusted })
        .collect()
}

/// The full pipeline. The first target (by location) anchors the analysis
/// disc and the direction comparison; every target is reported.
pub fn analyze(config: &RunConfig) -> Result<RunReport, CliError> {
    config.validate()?;
    let p = parse(&config.symbol_text)?;
    let targets = find_targets(&p, config.box_halfwidth, config.seeds_per_axis)?;
    let Some(primary) = targets.first().cloned() else {
        return Err(CliError::NoCriticalPoint);
    };
    let cone_check = cone_check(&p, &targets, config)?;

    let jobs: Vec<(f64, BasisConfig)> =
        config.h_list.iter().flat_map(|&h| config.basis.iter().map(move |b| (h, *b))).collect();
    let focus = Focus { center: primary.z0, radius: config.disc_radius, k_use: config.k_use };
    let runs = jobs
        .par_iter()
        .map(|&(h, basis)| -> Result<RunEntry, CliError> {
            let (cloud, n) = compute_cloud(&p, h, &basis, config.match_tol, Some(focus), config.max_chebyshev_n)?;
            let near = cloud.restrict_to_disc(primary.z0, config.disc_radius);
            let fitted = match fit_direction(&near, primary.z0, config.k_use) {
                Ok(phi) => Some(phi),
                Err(e) => {
                    log::warn!("h={h} {}: {e}", basis.name());
                    None
                }
            };
            Ok(RunEntry {
                h,
                basis: basis.name().to_string(),
                n,
                eigenvalues: disc_table(&cloud, primary.z0, config.disc_radius),
                fitted_direction_rad: fitted,
                predicted_direction_rad: primary.direction(),
                angle_error_rad: fitted.map(|phi| wrap_mod_pi(phi - primary.direction()).abs()),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    Ok(RunReport {
        symbol: config.symbol_text.clone(),
        critical_points: targets.iter().map(Target::report).collect(),
        range_class: primary.range_class,
        runs,
        cone_check,
    })
}
