use std::f64::consts::PI;

use num_complex::Complex64;

use semispec::cli::{compute_cloud, BasisConfig, CliError};
use semispec::linalg::EigenvalueCloud;
use semispec::predict::{fit_spectral_function, predict_string};
use semispec::quadratics::{positivity_direction, select_mu};
use semispec::symbols::{find_real_critical_points, parse_symbol, PolySymbol};
use semispec::Error;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn davies(alpha: f64) -> PolySymbol {
    PolySymbol::from_terms([((0, 2), c(1.0, 0.0)), ((2, 0), Complex64::from_polar(1.0, alpha))])
}

fn hermite(p: &PolySymbol, h: f64, n: usize) -> EigenvalueCloud {
    compute_cloud(p, h, &BasisConfig::Hermite { n, partner_n: Some(2 * n) }, 1e-6, None, 0).unwrap().0
}

#[test]
fn davies_spectrum_follows_predicted_string() {
    let h = 0.05;
    for alpha in [PI / 6.0, PI / 4.0, PI / 3.0] {
        let p = davies(alpha);
        let points = find_real_critical_points(&p, 4.0, 32).unwrap();
        assert_eq!(points.len(), 1);
        let cp = &points[0];
        let cert = positivity_direction(&cp.hessian).unwrap();
        let mu = select_mu(&cp.hessian, &cert).unwrap();
        let pred = predict_string(cp.value, mu, h, 5).unwrap();

        let cloud = hermite(&p, h, 256).sorted_by_distance(cp.value);
        let trusted: Vec<Complex64> = cloud.trusted_values().collect();
        assert!(trusted.len() >= 8, "alpha={alpha}: {} trusted", trusted.len());
        for (z, w) in trusted.iter().zip(&pred.string) {
            assert!((z - w).norm() <= 1e-6 * w.norm(), "alpha={alpha}: {z} vs {w}");
        }
    }
}

#[test]
fn trusted_values_are_stable_under_refinement() {
    let p = davies(PI / 4.0);
    let cloud = hermite(&p, 0.05, 256);
    let shifts: Vec<f64> = cloud.trusted.iter().zip(&cloud.shifts).filter(|(t, _)| **t).map(|(_, s)| s.unwrap()).collect();
    assert!(!shifts.is_empty());
    let mut low: Vec<Complex64> = cloud.trusted_values().collect();
    low.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    let mut high: Vec<Complex64> = hermite(&p, 0.05, 512).trusted_values().collect();
    high.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    for (a, b) in low.iter().zip(&high).take(5) {
        assert!((a - b).norm() < 1e-8, "{a} vs {b}");
    }
}

#[test]
fn quartic_spectral_function_has_predicted_slope() {
    let p = parse_symbol("xi^2 + (1+3i)*x^2 + x^4").unwrap();
    let h = 0.005;
    let cloud = hermite(&p, h, 400).restrict_to_disc(c(0.0, 0.0), 0.5);
    let fit = fit_spectral_function(&cloud, c(0.0, 0.0), h, 2).unwrap();
    assert!((fit.linear_direction() - 3f64.atan() / 2.0).abs() < 0.05, "{}", fit.linear_direction());
    assert!(fit.g0_coeffs[2].norm() > 1e-6);
}

#[test]
fn exit_codes_follow_error_class() {
    let cases = [
        (CliError::Parse(Error::Exponent { offset: 0 }), 2),
        (CliError::Config("bad".into()), 2),
        (CliError::NoCriticalPoint, 3),
        (CliError::Eigensolver(Error::NoConvergence { sweeps: 1, partial: vec![] }), 4),
        (CliError::ConeCheckFailed, 5),
        (CliError::Library(Error::NotSchrodinger), 1),
        (CliError::Io("disk".into()), 1),
    ];
    for (err, code) in cases {
        assert_eq!(err.exit_code(), code, "{err}");
    }
}
