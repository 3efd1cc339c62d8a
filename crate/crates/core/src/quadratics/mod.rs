//! Complex quadratic forms on the real phase plane: Hamilton maps, the
//! distinguished eigenvalue `mu`, the range dichotomy (full plane versus a
//! proper convex cone) and the real symplectic normal form.

mod normal_form;
mod range_class;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use normal_form::{symplectic_normal_form, NormalForm};
pub use range_class::{classify_range, range_ellipse, RangeClass, RangeEllipse};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Quadratic form `q(X) = <H X, X> / 2` with symmetric complex Hessian
/// `H = [[hxx, hxxi], [hxxi, hxixi]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadForm {
    pub hxx: Complex64,
    pub hxxi: Complex64,
    pub hxixi: Complex64,
}

impl QuadForm {
    pub fn new(hxx: Complex64, hxxi: Complex64, hxixi: Complex64) -> Self {
        Self { hxx, hxxi, hxixi }
    }

    /// The form `a x^2 + b xi^2 + 2 c x xi`.
    pub fn from_coefficients(a: Complex64, b: Complex64, c: Complex64) -> Self {
        Self::new(a * 2.0, c * 2.0, b * 2.0)
    }

    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        [[self.hxx, self.hxxi], [self.hxxi, self.hxixi]]
    }

    pub fn eval(&self, x: Complex64, xi: Complex64) -> Complex64 {
        self.bilinear([x, xi], [x, xi])
    }

    /// Polarization `q(X, Y) = <H X, Y> / 2` (bilinear, no conjugation).
    pub fn bilinear(&self, x: [Complex64; 2], y: [Complex64; 2]) -> Complex64 {
        let hx = [self.hxx * x[0] + self.hxxi * x[1], self.hxxi * x[0] + self.hxixi * x[1]];
        (hx[0] * y[0] + hx[1] * y[1]) * 0.5
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.hxx * s, self.hxxi * s, self.hxixi * s)
    }

    /// `q o S` for a real linear map `S`, i.e. Hessian `S^T H S`.
    pub fn compose_real(&self, s: [[f64; 2]; 2]) -> Self {
        let h = self.matrix();
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, o) in row.iter_mut().enumerate() {
                for k in 0..2 {
                    for l in 0..2 {
                        *o += h[k][l] * (s[k][i] * s[l][j]);
                    }
                }
            }
        }
        Self::new(out[0][0], out[0][1], out[1][1])
    }

    pub fn frobenius_norm(&self) -> f64 {
        (self.hxx.norm_sqr() + 2.0 * self.hxxi.norm_sqr() + self.hxixi.norm_sqr()).sqrt()
    }

    /// `(sigma_max, sigma_min)` of the Hessian matrix.
    pub fn singular_values(&self) -> (f64, f64) {
        let fro2 = self.frobenius_norm().powi(2);
        let det = (self.hxx * self.hxixi - self.hxxi * self.hxxi).norm();
        let disc = (fro2 * fro2 - 4.0 * det * det).max(0.0).sqrt();
        let smax = ((fro2 + disc) / 2.0).sqrt();
        let smin = if smax > 0.0 { det / smax } else { 0.0 };
        (smax, smin)
    }

    /// Smallest eigenvalue of `Re(e^{i theta} H)`.
    fn rotated_min_eig(&self, theta: f64) -> f64 {
        let e = Complex64::from_polar(1.0, theta);
        let a = (e * self.hxx).re;
        let b = (e * self.hxxi).re;
        let c = (e * self.hxixi).re;
        0.5 * (a + c) - (0.5 * (a - c)).hypot(b)
    }
}

/// Complex symplectic form `sigma((x1, xi1), (x2, xi2)) = xi1 x2 - x1 xi2`.
pub fn symplectic_form(x: [Complex64; 2], y: [Complex64; 2]) -> Complex64 {
    x[1] * y[0] - x[0] * y[1]
}

/// Hamilton map `F` of a quadratic form, defined by `q(X, Y) = sigma(X, F Y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonMap {
    f: [[Complex64; 2]; 2],
}

impl HamiltonMap {
    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        self.f
    }

    pub fn apply(&self, y: [Complex64; 2]) -> [Complex64; 2] {
        [self.f[0][0] * y[0] + self.f[0][1] * y[1], self.f[1][0] * y[0] + self.f[1][1] * y[1]]
    }

    pub fn det(&self) -> Complex64 {
        self.f[0][0] * self.f[1][1] - self.f[0][1] * self.f[1][0]
    }
}

/// `F = 1/2 [[h_xxi, h_xixi], [-h_xx, -h_xxi]]`; trace-free by construction.
pub fn hamilton_map(q: &QuadForm) -> HamiltonMap {
    HamiltonMap {
        f: [[q.hxxi * 0.5, q.hxixi * 0.5], [-q.hxx * 0.5, -q.hxxi * 0.5]],
    }
}

/// The eigenvalue pair `(mu, -mu)` of a trace-free Hamilton map, with
/// `mu = sqrt(-det F)` on the principal branch.
pub fn hamilton_eigenvalues(f: &HamiltonMap) -> Result<(Complex64, Complex64)> {
    let norm2: f64 = f.f.iter().flatten().map(|z| z.norm_sqr()).sum();
    let det = f.det();
    if det.norm() <= 1e-14 * norm2 {
        return Err(Error::SingularHamiltonMap);
    }
    let mu = (-det).sqrt();
    Ok((mu, -mu))
}

/// A unit `alpha` with `Re(alpha H)` positive definite, and the open arc of
/// admissible `arg(alpha)` it was taken from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositivityCertificate {
    pub alpha: Complex64,
    pub admissible_arc: (f64, f64),
}

const SCAN_STEP: f64 = 1e-3;
const ARC_TOL: f64 = 1e-9;

/// Scans `arg(alpha)` over the circle for `Re(alpha H) > 0`, then bisects
/// both arc endpoints. `None` means no rotation makes the real part
/// positive definite (the range is not contained in a half-plane).
pub fn positivity_direction(q: &QuadForm) -> Option<PositivityCertificate> {
    let scale = q.frobenius_norm();
    if scale == 0.0 {
        return None;
    }
    let q = q.scale(Complex64::new(1.0 / scale, 0.0));
    let steps = (2.0 * PI / SCAN_STEP).ceil() as usize;
    let theta = |k: usize| 2.0 * PI * k as f64 / steps as f64;
    let good: Vec<bool> = (0..steps).map(|k| q.rotated_min_eig(theta(k)) > 0.0).collect();

    let start = (0..steps).find(|&k| good[k] && !good[(k + steps - 1) % steps])?;
    let len = (0..steps).take_while(|&m| good[(start + m) % steps]).count();
    if len == steps {
        return None;
    }

    // boundary lies between a failing and a passing angle
    let bisect = |mut bad: f64, mut ok: f64| {
        while (ok - bad).abs() > ARC_TOL {
            let mid = 0.5 * (ok + bad);
            if q.rotated_min_eig(mid) > 0.0 {
                ok = mid;
            } else {
                bad = mid;
            }
        }
        ok
    };
    let s = theta(start);
    let lo = bisect(s - 2.0 * PI / steps as f64, s);
    let last = s + (len - 1) as f64 * 2.0 * PI / steps as f64;
    let hi = bisect(last + 2.0 * PI / steps as f64, last);

    let shift = (lo + PI).div_euclid(2.0 * PI) * 2.0 * PI;
    let (lo, hi) = (lo - shift, hi - shift);
    Some(PositivityCertificate {
        alpha: Complex64::from_polar(1.0, 0.5 * (lo + hi)),
        admissible_arc: (lo, hi),
    })
}

/// The member of `+-mu` with `Re(alpha mu / i) > 0`.
pub fn select_mu(q: &QuadForm, cert: &PositivityCertificate) -> Result<Complex64> {
    let (mu, _) = hamilton_eigenvalues(&hamilton_map(q))?;
    let s = (cert.alpha * mu / I).re;
    if s.abs() <= 1e-12 * mu.norm() {
        return Err(Error::AmbiguousSelection(s));
    }
    Ok(if s > 0.0 { mu } else { -mu })
}
