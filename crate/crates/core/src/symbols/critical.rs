use num_complex::Complex64;

use super::poly::PolySymbol;
use crate::error::{Error, Result};
use crate::quadratics::QuadForm;

const MAX_ITERATIONS: usize = 50;
const MERGE_RADIUS: f64 = 1e-6;
const NONDEGENERACY_RATIO: f64 = 1e-8;
/// Hessians below this (relative to the coefficient 1-norm) count as zero:
/// a zero of the gradient vanishing to higher order is only located to about
/// `tol^(1/3)`, where the true Hessian is still tiny but well conditioned.
const ZERO_HESSIAN: f64 = 1e-6;

/// A real point where both partial derivatives of the symbol vanish.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalPoint {
    pub location: (f64, f64),
    pub value: Complex64,
    pub hessian: QuadForm,
    pub nondegenerate: bool,
    /// `max(|dp/dx|, |dp/dxi|)` at `location`.
    pub residual: f64,
}

/// Partials needed by the solver, differentiated once up front.
struct Derivatives {
    px: PolySymbol,
    pxi: PolySymbol,
    pxx: PolySymbol,
    pxxi: PolySymbol,
    pxixi: PolySymbol,
}

impl Derivatives {
    fn new(p: &PolySymbol) -> Self {
        Self {
            px: p.derivative(1, 0),
            pxi: p.derivative(0, 1),
            pxx: p.derivative(2, 0),
            pxxi: p.derivative(1, 1),
            pxixi: p.derivative(0, 2),
        }
    }

    fn residual(&self, x: f64, xi: f64) -> [f64; 4] {
        let gx = self.px.eval_real(x, xi);
        let gxi = self.pxi.eval_real(x, xi);
        [gx.re, gx.im, gxi.re, gxi.im]
    }

    fn jacobian(&self, x: f64, xi: f64) -> [[f64; 2]; 4] {
        let a = self.pxx.eval_real(x, xi);
        let b = self.pxxi.eval_real(x, xi);
        let c = self.pxixi.eval_real(x, xi);
        [[a.re, b.re], [a.im, b.im], [b.re, c.re], [b.im, c.im]]
    }
}

fn norm4(r: &[f64; 4]) -> f64 {
    r.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Damped Gauss-Newton on the stacked real residual. Iterates until the
/// residual stops decreasing (or vanishes), so degenerate zeros are
/// polished as far as the iteration budget allows.
fn refine(d: &Derivatives, seed: (f64, f64)) -> ((f64, f64), f64) {
    let (mut x, mut xi) = seed;
    let mut r = d.residual(x, xi);
    let mut nr = norm4(&r);
    for _ in 0..MAX_ITERATIONS {
        if nr == 0.0 {
            break;
        }
        let j = d.jacobian(x, xi);
        // normal equations J^T J delta = -J^T r
        let mut a = [[0.0; 2]; 2];
        let mut g = [0.0; 2];
        for (row, rv) in j.iter().zip(r.iter()) {
            for p in 0..2 {
                g[p] -= row[p] * rv;
                for q in 0..2 {
                    a[p][q] += row[p] * row[q];
                }
            }
        }
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        let scale = (a[0][0] + a[1][1]).powi(2);
        if !(det > 1e-30 * scale) || scale == 0.0 {
            break;
        }
        let dx = (g[0] * a[1][1] - g[1] * a[0][1]) / det;
        let dxi = (a[0][0] * g[1] - a[1][0] * g[0]) / det;

        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let (cx, cxi) = (x + step * dx, xi + step * dxi);
            let cr = d.residual(cx, cxi);
            let cn = norm4(&cr);
            if cn < nr {
                (x, xi, r, nr) = (cx, cxi, cr, cn);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    ((x, xi), nr)
}

/// Locates real critical points of `p` inside `[-box, box]^2` by refining a
/// uniform `seeds_per_axis x seeds_per_axis` grid of starting points.
///
/// An empty result is a valid outcome: the symbol is of principal type in
/// the box.
pub fn find_real_critical_points(
    p: &PolySymbol,
    box_halfwidth: f64,
    seeds_per_axis: usize,
) -> Result<Vec<CriticalPoint>> {
    if !(box_halfwidth > 0.0) {
        return Err(Error::InvalidArgument(format!("box_halfwidth must be positive, got {box_halfwidth}")));
    }
    if seeds_per_axis < 8 {
        return Err(Error::InvalidArgument(format!("seeds_per_axis must be at least 8, got {seeds_per_axis}")));
    }
    let d = Derivatives::new(p);
    let tol = 1e-12 * (1.0 + p.one_norm());
    let spacing = 2.0 * box_halfwidth / (seeds_per_axis - 1) as f64;
    let limit = box_halfwidth * (1.0 + 1e-9);
    let zero_hessian = ZERO_HESSIAN * (1.0 + p.one_norm());

    let mut found: Vec<((f64, f64), f64)> = Vec::new();
    for i in 0..seeds_per_axis {
        for j in 0..seeds_per_axis {
            let seed = (-box_halfwidth + i as f64 * spacing, -box_halfwidth + j as f64 * spacing);
            let (loc, res) = refine(&d, seed);
            if res > tol || loc.0.abs() > limit || loc.1.abs() > limit {
                continue;
            }
            match found
                .iter_mut()
                .find(|(q, _)| (q.0 - loc.0).hypot(q.1 - loc.1) < MERGE_RADIUS)
            {
                Some(existing) if res < existing.1 => *existing = (loc, res),
                Some(_) => {}
                None => found.push((loc, res)),
            }
        }
    }
    found.sort_by(|a, b| a.0 .0.total_cmp(&b.0 .0).then(a.0 .1.total_cmp(&b.0 .1)));

    Ok(found
        .into_iter()
        .map(|((x, xi), _)| {
            let hessian = p.hessian_at(x, xi);
            let (smax, smin) = hessian.singular_values();
            let r = d.residual(x, xi);
            CriticalPoint {
                location: (x, xi),
                value: p.eval_real(x, xi),
                nondegenerate: smax > zero_hessian && smin >= NONDEGENERACY_RATIO * smax,
                residual: r[0].hypot(r[1]).max(r[2].hypot(r[3])),
                hessian,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::parse_symbol;

    #[test]
    fn fig1_quartic_has_one_nondegenerate_point() {
        let p = parse_symbol("xi^2 + (1+3i)*x^2 + x^4").unwrap();
        let pts = find_real_critical_points(&p, 2.0, 32).unwrap();
        assert_eq!(pts.len(), 1);
        let cp = &pts[0];
        assert!(cp.location.0.hypot(cp.location.1) <= 1e-8);
        assert!(cp.value.norm() < 1e-14);
        assert!(cp.nondegenerate);
        assert!(cp.residual <= 1e-10 * (1.0 + p.one_norm()));
    }

    #[test]
    fn convection_diffusion_has_none() {
        let p = parse_symbol("xi^2 + i*xi + x^2").unwrap();
        assert!(find_real_critical_points(&p, 2.0, 32).unwrap().is_empty());
    }

    #[test]
    fn degenerate_quartic_minimum_is_flagged() {
        let p = parse_symbol("(x^2 + xi^2)^2").unwrap();
        let pts = find_real_critical_points(&p, 1.0, 32).unwrap();
        assert_eq!(pts.len(), 1);
        assert!(!pts[0].nondegenerate);
        assert!(pts[0].location.0.hypot(pts[0].location.1) < 1e-6);
    }

    #[test]
    fn double_well_has_three_points() {
        // (x^2 - 1)^2 + xi^2: minima at x = +-1 and a saddle at 0
        let p = parse_symbol("(x^2 - 1)^2 + xi^2").unwrap();
        let pts = find_real_critical_points(&p, 2.0, 16).unwrap();
        let xs: Vec<f64> = pts.iter().map(|c| c.location.0).collect();
        assert_eq!(xs.len(), 3, "{xs:?}");
        for (x, want) in xs.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((x - want).abs() < 1e-10);
        }
        assert!(pts.iter().all(|c| c.nondegenerate));
    }

    #[test]
    fn rejects_bad_arguments() {
        let p = parse_symbol("x^2 + xi^2").unwrap();
        assert!(find_real_critical_points(&p, 0.0, 32).is_err());
        assert!(find_real_critical_points(&p, 1.0, 7).is_err());
    }
}
