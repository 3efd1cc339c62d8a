//! The predicted eigenvalue string `z_k = z0 + (mu/i) h (2k+1)` and fits of
//! the observed direction and spectral function `G0` against it.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::EigenvalueCloud;

const I: Complex64 = Complex64::new(0.0, 1.0);
const MIN_FIT_POINTS: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub z0: Complex64,
    pub mu: Complex64,
    /// `arg(mu / i)`.
    pub direction: f64,
    pub string: Vec<Complex64>,
    pub h: f64,
    pub k_max: usize,
}

pub fn predict_string(z0: Complex64, mu: Complex64, h: f64, k_max: usize) -> Result<Prediction> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!("h must be positive, got {h}")));
    }
    if mu == Complex64::new(0.0, 0.0) {
        return Err(Error::InvalidArgument("mu must be nonzero".into()));
    }
    let step = mu / I;
    Ok(Prediction {
        z0,
        mu,
        direction: step.arg(),
        string: (0..=k_max).map(|k| z0 + step * (h * (2 * k + 1) as f64)).collect(),
        h,
        k_max,
    })
}

/// Wraps an angle difference to `(-pi/2, pi/2]`, the natural range for
/// undirected lines.
pub fn wrap_mod_pi(a: f64) -> f64 {
    let r = a.rem_euclid(PI);
    if r > PI / 2.0 {
        r - PI
    } else {
        r
    }
}

/// Trusted values sorted by distance to `z0`, excluding `z0` itself.
fn trusted_offsets(cloud: &EigenvalueCloud, z0: Complex64) -> Vec<Complex64> {
    let sorted = cloud.sorted_by_distance(z0);
    sorted
        .trusted_values()
        .map(|z| z - z0)
        .filter(|w| w.norm() >= 1e-12)
        .collect()
}

/// Principal axis through `z0` of the `k_use` trusted values nearest to it:
/// `1/2 arg sum (z - z0)^2`, in `(-pi/2, pi/2]`.
pub fn fit_direction(cloud: &EigenvalueCloud, z0: Complex64, k_use: usize) -> Result<f64> {
    let offsets = trusted_offsets(cloud, z0);
    let used = &offsets[..k_use.min(offsets.len())];
    if used.len() < MIN_FIT_POINTS {
        return Err(Error::TooFewTrusted { needed: MIN_FIT_POINTS, found: used.len() });
    }
    let s: Complex64 = used.iter().map(|w| w * w).sum();
    Ok(0.5 * s.arg())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralFit {
    /// `g0_coeffs[m]` multiplies `q^m`; index 0 is held at zero.
    pub g0_coeffs: Vec<Complex64>,
    pub per_k_residuals: Vec<f64>,
}

impl SpectralFit {
    /// `arg G0'(0)`, the direction of the linear coefficient.
    pub fn linear_direction(&self) -> f64 {
        self.g0_coeffs[1].arg()
    }
}

/// Least squares `z_k - z0 ~ sum_{m=1..degree} g_m q_k^m` with
/// `q_k = h (k + 1/2)`, over the trusted values of `cloud` ordered by
/// distance from `z0`.
pub fn fit_spectral_function(cloud: &EigenvalueCloud, z0: Complex64, h: f64, degree: usize) -> Result<SpectralFit> {
    if !(1..=4).contains(&degree) {
        return Err(Error::InvalidArgument(format!("degree must be in 1..=4, got {degree}")));
    }
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("h must be positive, got {h}")));
    }
    let rhs = trusted_offsets(cloud, z0);
    let points = rhs.len();
    if points < degree {
        return Err(Error::RankDeficient { points, degree });
    }
    let q: Vec<f64> = (0..points).map(|k| h * (k as f64 + 0.5)).collect();

    // columns q^m scaled to unit norm, then modified Gram-Schmidt
    let mut cols: Vec<Vec<f64>> = (1..=degree).map(|m| q.iter().map(|v| v.powi(m as i32)).collect()).collect();
    let scales: Vec<f64> = cols.iter().map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt()).collect();
    for (c, s) in cols.iter_mut().zip(&scales) {
        c.iter_mut().for_each(|v| *v /= s);
    }
    let mut r = vec![vec![0.0; degree]; degree];
    for j in 0..degree {
        for i in 0..j {
            let dot: f64 = cols[i].iter().zip(&cols[j]).map(|(a, b)| a * b).sum();
            r[i][j] = dot;
            let ci = cols[i].clone();
            cols[j].iter_mut().zip(&ci).for_each(|(b, a)| *b -= dot * a);
        }
        let norm = cols[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm <= 1e-12 {
            return Err(Error::RankDeficient { points, degree });
        }
        r[j][j] = norm;
        cols[j].iter_mut().for_each(|v| *v /= norm);
    }
    let qtb: Vec<Complex64> = cols.iter().map(|c| c.iter().zip(&rhs).map(|(a, b)| b * a).sum()).collect();
    let mut y = vec![Complex64::new(0.0, 0.0); degree];
    for i in (0..degree).rev() {
        let mut acc = qtb[i];
        for j in i + 1..degree {
            acc -= y[j] * r[i][j];
        }
        y[i] = acc / r[i][i];
    }

    let mut g0_coeffs = vec![Complex64::new(0.0, 0.0)];
    g0_coeffs.extend(y.iter().zip(&scales).map(|(v, s)| v / s));
    let per_k_residuals = q
        .iter()
        .zip(&rhs)
        .map(|(&qk, w)| {
            let model: Complex64 = g0_coeffs.iter().enumerate().map(|(m, g)| g * qk.powi(m as i32)).sum();
            (w - model).norm()
        })
        .collect();
    Ok(SpectralFit { g0_coeffs, per_k_residuals })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub fitted_direction: f64,
    pub angle_error: f64,
    pub per_k_residuals: Vec<f64>,
    pub g0_coeffs: Vec<Complex64>,
}

/// Fits direction and `G0` and compares against the prediction; the angle
/// error is taken modulo `pi`.
pub fn compare(prediction: &Prediction, cloud: &EigenvalueCloud, k_use: usize, degree: usize) -> Result<FitResult> {
    let fitted_direction = fit_direction(cloud, prediction.z0, k_use)?;
    let fit = fit_spectral_function(cloud, prediction.z0, prediction.h, degree)?;
    Ok(FitResult {
        fitted_direction,
        angle_error: wrap_mod_pi(fitted_direction - prediction.direction).abs(),
        per_k_residuals: fit.per_k_residuals,
        g0_coeffs: fit.g0_coeffs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::filter_trusted;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cloud(values: &[Complex64]) -> EigenvalueCloud {
        filter_trusted(values, values, 0.01, 1e-6)
    }

    #[test]
    fn davies_and_harmonic_strings() {
        let alpha = 0.9;
        let h = 0.05;
        let mu = I * Complex64::from_polar(1.0, alpha / 2.0);
        let p = predict_string(c(0.0, 0.0), mu, h, 4).unwrap();
        for (k, z) in p.string.iter().enumerate() {
            assert!((z - Complex64::from_polar(h * (2 * k + 1) as f64, alpha / 2.0)).norm() < 1e-15);
        }

        let p = predict_string(c(0.0, 0.0), I, 0.1, 2).unwrap();
        assert_eq!(p.direction, 0.0);
        for (z, want) in p.string.iter().zip([0.1, 0.3, 0.5]) {
            assert!((z - c(want, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn fig1_string_geometry() {
        let mu = I * c(1.0, 3.0).sqrt();
        let p = predict_string(c(0.0, 0.0), mu, 0.01, 9).unwrap();
        assert_eq!(p.string.len(), 10);
        assert!((p.direction - 0.62452).abs() < 1e-5);
        let spacing = (p.string[1] - p.string[0]).norm();
        assert!((spacing - 0.02 * 10f64.powf(0.25)).abs() < 1e-14);
        for w in p.string.windows(2) {
            assert!(w[1].norm() > w[0].norm());
            assert!((w[0].arg() - p.direction).abs() < 1e-14);
        }
    }

    #[test]
    fn direction_of_exact_ray() {
        let theta = 0.62452;
        let pts: Vec<Complex64> = (0..6).map(|k| Complex64::from_polar(0.1 * (k + 1) as f64, theta)).collect();
        assert!((fit_direction(&cloud(&pts), c(0.0, 0.0), 5).unwrap() - theta).abs() < 1e-14);
    }

    #[test]
    fn direction_with_perpendicular_noise() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let theta = 1.1;
        let z0 = c(0.3, -0.2);
        let pts: Vec<Complex64> = (0..8)
            .map(|k| {
                let r = 0.05 * (2 * k + 1) as f64;
                z0 + Complex64::from_polar(1.0, theta) * c(r, r * rng.gen_range(-1e-3..1e-3))
            })
            .collect();
        let got = fit_direction(&cloud(&pts), z0, 5).unwrap();
        assert!(wrap_mod_pi(got - theta).abs() < 2e-3);
    }

    #[test]
    fn own_prediction_round_trips() {
        for (mu, z0) in [(I * c(1.0, 3.0).sqrt(), c(0.0, 0.0)), (I * Complex64::from_polar(1.0, 0.4), c(1.0, 2.0))] {
            let p = predict_string(z0, mu, 0.02, 7).unwrap();
            let got = fit_direction(&cloud(&p.string), z0, 5).unwrap();
            assert!(wrap_mod_pi(got - p.direction).abs() < 1e-12);
        }
    }

    #[test]
    fn rotation_equivariance() {
        let pts: Vec<Complex64> = (0..6).map(|k| c(0.1 * k as f64 + 0.05, 0.02 * (k * k) as f64)).collect();
        let z0 = c(0.0, 0.0);
        let base = fit_direction(&cloud(&pts), z0, 5).unwrap();
        for theta in [0.3, 1.7, -2.5] {
            let rot = Complex64::from_polar(1.0, theta);
            let rotated: Vec<Complex64> = pts.iter().map(|z| z * rot).collect();
            let got = fit_direction(&cloud(&rotated), z0 * rot, 5).unwrap();
            assert!(wrap_mod_pi(got - base - theta).abs() < 1e-12);
        }
    }

    #[test]
    fn untrusted_and_too_few() {
        let low = [c(0.1, 0.0), c(0.3, 0.0), c(0.5, 0.1)];
        let high = [c(0.1, 0.0), c(0.3, 0.0)];
        let cl = filter_trusted(&low, &high, 0.01, 1e-6);
        assert_eq!(fit_direction(&cl, c(0.0, 0.0), 5), Err(Error::TooFewTrusted { needed: 3, found: 2 }));
        // z0 itself is excluded
        let cl = cloud(&[c(0.0, 0.0), c(0.1, 0.0), c(0.3, 0.0)]);
        assert!(fit_direction(&cl, c(0.0, 0.0), 5).is_err());
    }

    #[test]
    fn spectral_function_of_exact_strings() {
        let h = 0.1;
        let harmonic: Vec<Complex64> = (0..6).map(|k| c(h * (2 * k + 1) as f64, 0.0)).collect();
        let fit = fit_spectral_function(&cloud(&harmonic), c(0.0, 0.0), h, 1).unwrap();
        assert_eq!(fit.g0_coeffs[0], c(0.0, 0.0));
        assert!((fit.g0_coeffs[1] - c(2.0, 0.0)).norm() < 1e-12);

        let alpha = std::f64::consts::FRAC_PI_3;
        let h = 0.05;
        let p = predict_string(c(0.0, 0.0), I * Complex64::from_polar(1.0, alpha / 2.0), h, 7).unwrap();
        let fit = fit_spectral_function(&cloud(&p.string), c(0.0, 0.0), h, 2).unwrap();
        assert!((fit.g0_coeffs[1] - Complex64::from_polar(2.0, alpha / 2.0)).norm() < 1e-8);
        assert!(fit.g0_coeffs[2].norm() < 1e-8);
        assert!(fit.per_k_residuals.iter().all(|r| *r < 1e-12));
    }

    #[test]
    fn spectral_function_rank_deficiency() {
        let cl = cloud(&[c(0.1, 0.0), c(0.3, 0.0)]);
        assert_eq!(
            fit_spectral_function(&cl, c(0.0, 0.0), 0.05, 3),
            Err(Error::RankDeficient { points: 2, degree: 3 })
        );
        assert!(fit_spectral_function(&cl, c(0.0, 0.0), 0.05, 5).is_err());
    }

    #[test]
    fn compare_wraps_angle_modulo_pi() {
        let mu = I * Complex64::from_polar(1.0, 3.0);
        let p = predict_string(c(0.0, 0.0), mu, 0.05, 6).unwrap();
        let res = compare(&p, &cloud(&p.string), 5, 1).unwrap();
        assert!(res.angle_error < 1e-12, "{}", res.angle_error);
    }
}
