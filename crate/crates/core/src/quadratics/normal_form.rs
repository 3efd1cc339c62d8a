use num_complex::Complex64;

use super::{PositivityCertificate, QuadForm};
use crate::error::{Error, Result};

const MAX_CONDITION: f64 = 1e12;

/// Real symplectic normal form of `alpha q`:
/// `(alpha q)(T Y) = K/2 (y^2 + e^{i alpha_nf} eta^2)` with
/// `K = (lambda + i a) |d|^{1/2}` and `d = (lambda + i b) / (lambda + i a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalForm {
    pub lambda: f64,
    pub a: f64,
    pub b: f64,
    pub alpha_nf: f64,
    /// `sqrt((lambda + i a)(lambda + i b)) / 2`, principal branch.
    pub mu_over_i: Complex64,
    /// Real `2x2` matrix of determinant 1 taking normal coordinates to the
    /// original ones.
    pub transform: [[f64; 2]; 2],
}

impl NormalForm {
    /// The scale `K` of the normal form.
    pub fn k(&self) -> Complex64 {
        let d = Complex64::new(self.lambda, self.b) / Complex64::new(self.lambda, self.a);
        Complex64::new(self.lambda, self.a) * d.norm().sqrt()
    }

    /// Hessian of the normal form, i.e. `diag(K, K e^{i alpha_nf})`.
    pub fn quad_form(&self) -> QuadForm {
        let k = self.k();
        QuadForm::new(k, Complex64::new(0.0, 0.0), k * Complex64::from_polar(1.0, self.alpha_nf))
    }
}

fn matmul(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Eigen-decomposition of a real symmetric `[[p, r], [r, s]]`: returns
/// `(l1, l2, angle)` with `l1 >= l2` and the `l1` eigenvector at `angle`.
fn sym_eig(p: f64, r: f64, s: f64) -> (f64, f64, f64) {
    let m = 0.5 * (p + s);
    let h = (0.5 * (p - s)).hypot(r);
    (m + h, m - h, 0.5 * (2.0 * r).atan2(p - s))
}

fn rotation(angle: f64) -> [[f64; 2]; 2] {
    let (s, c) = angle.sin_cos();
    [[c, -s], [s, c]]
}

/// Reduces `alpha q` to normal form by a real symplectic change of variables:
/// normalise the positive real part to `lambda I`, rotate the imaginary part
/// to diagonal `(a, b)` with `a <= b`, then dilate.
pub fn symplectic_normal_form(q: &QuadForm, cert: &PositivityCertificate) -> Result<NormalForm> {
    let rotated = q.scale(cert.alpha);
    let (l1, l2, angle) = sym_eig(rotated.hxx.re, rotated.hxxi.re, rotated.hxixi.re);
    if !(l2 > 0.0) || l1 / l2 > MAX_CONDITION {
        return Err(Error::IllConditioned(if l2 > 0.0 { l1 / l2 } else { f64::INFINITY }));
    }
    let lambda = (l1 * l2).sqrt();

    // S1 = sqrt(lambda) R^{-1/2}, so S1^T R S1 = lambda I and det S1 = 1
    let v = rotation(angle);
    let vt = [[v[0][0], v[1][0]], [v[0][1], v[1][1]]];
    let root = lambda.sqrt();
    let s1 = matmul(matmul(v, [[root / l1.sqrt(), 0.0], [0.0, root / l2.sqrt()]]), vt);

    let im = rotated.compose_real(s1);
    let (hi, lo, phi) = sym_eig(im.hxx.im, im.hxxi.im, im.hxixi.im);
    // the larger imaginary eigenvalue goes on the eta axis
    let (a, b) = (lo, hi);
    let q2 = matmul(rotation(phi), [[0.0, 1.0], [-1.0, 0.0]]);

    let s = ((Complex64::new(lambda, b).norm() / Complex64::new(lambda, a).norm()).powf(0.25)).max(f64::MIN_POSITIVE);
    let transform = matmul(matmul(s1, q2), [[s, 0.0], [0.0, 1.0 / s]]);

    let d = Complex64::new(lambda, b) / Complex64::new(lambda, a);
    Ok(NormalForm {
        lambda,
        a,
        b,
        alpha_nf: d.arg(),
        mu_over_i: (Complex64::new(lambda, a) * Complex64::new(lambda, b)).sqrt() * 0.5,
        transform,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadratics::{positivity_direction, select_mu};
    use proptest::prelude::*;

    const I: Complex64 = Complex64::new(0.0, 1.0);

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn check(q: &QuadForm) -> NormalForm {
        let cert = positivity_direction(q).unwrap();
        let nf = symplectic_normal_form(q, &cert).unwrap();
        let t = nf.transform;
        assert!((t[0][0] * t[1][1] - t[0][1] * t[1][0] - 1.0).abs() < 1e-10);
        assert!((0.0..std::f64::consts::PI).contains(&nf.alpha_nf));
        assert!(nf.a <= nf.b);

        let pulled = q.scale(cert.alpha).compose_real(t);
        let want = nf.quad_form();
        let scale = q.frobenius_norm();
        for (got, want) in [(pulled.hxx, want.hxx), (pulled.hxxi, want.hxxi), (pulled.hxixi, want.hxixi)] {
            assert!((got - want).norm() < 1e-9 * scale, "{got} vs {want}");
        }

        let mu = select_mu(q, &cert).unwrap();
        assert!((I * nf.mu_over_i / cert.alpha - mu).norm() < 1e-10 * mu.norm());
        nf
    }

    #[test]
    fn harmonic_is_already_normal() {
        let nf = check(&QuadForm::new(c(2.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)));
        assert!((nf.lambda - 2.0).abs() < 1e-8);
        assert!(nf.alpha_nf.abs() < 1e-12);
    }

    #[test]
    fn davies_and_fig1() {
        for alpha in [0.3, 1.0, 1.4] {
            let nf = check(&QuadForm::new(Complex64::from_polar(2.0, alpha), c(0.0, 0.0), c(2.0, 0.0)));
            assert!((nf.alpha_nf - alpha).abs() < 1e-8, "{} vs {alpha}", nf.alpha_nf);
        }
        check(&QuadForm::new(c(2.0, 6.0), c(0.0, 0.0), c(2.0, 0.0)));
    }

    #[test]
    fn ill_conditioned_real_part() {
        let q = QuadForm::new(c(1.0, 0.0), c(0.0, 0.0), c(1e-14, 0.0));
        let cert = PositivityCertificate { alpha: c(1.0, 0.0), admissible_arc: (-0.1, 0.1) };
        assert!(matches!(symplectic_normal_form(&q, &cert), Err(Error::IllConditioned(_))));
    }

    fn component() -> impl Strategy<Value = f64> {
        -2.0..2.0f64
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn normal_form_is_symplectically_equivalent(
            a in (component(), component()),
            b in (component(), component()),
            cc in (component(), component()),
        ) {
            let q = QuadForm::new(c(a.0, a.1), c(cc.0, cc.1), c(b.0, b.1));
            let Some(cert) = positivity_direction(&q) else { return Ok(()); };
            let rotated = q.scale(cert.alpha);
            let (l1, l2, _) = sym_eig(rotated.hxx.re, rotated.hxxi.re, rotated.hxixi.re);
            prop_assume!(l2 > 1e-3 * l1);
            check(&q);
        }
    }
}
