use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::poly::PolySymbol;
use crate::error::{Error, Result};

/// Largest grid the range sampler will evaluate.
pub const SAMPLE_BUDGET: u64 = 10_000_000;

const CONE_RADII: usize = 16;
const CONE_ANGLES: usize = 17;

/// Values of `p` on a uniform real grid over `[-box, box]^2`, row-major with
/// the `x` index varying slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeSample {
    pub values: Vec<Complex64>,
    pub box_halfwidth: f64,
    pub grid_step: f64,
    pub nodes_per_axis: usize,
}

impl RangeSample {
    /// Grid coordinates of the node stored at `index`.
    pub fn node(&self, index: usize) -> (f64, f64) {
        let n = self.nodes_per_axis;
        let (i, j) = (index / n, index % n);
        (
            -self.box_halfwidth + i as f64 * self.grid_step,
            -self.box_halfwidth + j as f64 * self.grid_step,
        )
    }
}

fn nodes_per_axis(box_halfwidth: f64, grid_step: f64) -> usize {
    (2.0 * box_halfwidth / grid_step + 1e-9).floor() as usize + 1
}

pub fn sample_range(p: &PolySymbol, box_halfwidth: f64, grid_step: f64) -> Result<RangeSample> {
    if !(grid_step > 0.0 && grid_step < box_halfwidth) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < grid_step < box_halfwidth, got step {grid_step}, box {box_halfwidth}"
        )));
    }
    let n = nodes_per_axis(box_halfwidth, grid_step);
    let nodes = (n as u64).saturating_mul(n as u64);
    if nodes > SAMPLE_BUDGET {
        return Err(Error::SampleBudget { nodes, budget: SAMPLE_BUDGET });
    }
    let mut values = vec![Complex64::new(0.0, 0.0); n * n];
    values.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        let x = -box_halfwidth + i as f64 * grid_step;
        for (j, v) in row.iter_mut().enumerate() {
            *v = p.eval_real(x, -box_halfwidth + j as f64 * grid_step);
        }
    });
    Ok(RangeSample { values, box_halfwidth, grid_step, nodes_per_axis: n })
}

/// Open sector `z0 + (0, eps0) * exp(i (theta0 - eps0, theta0 + eps0))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeSpec {
    theta0: f64,
    eps0: f64,
}

impl ConeSpec {
    pub fn new(theta0: f64, eps0: f64) -> Result<Self> {
        if !(eps0 > 0.0) || !theta0.is_finite() {
            return Err(Error::InvalidArgument(format!("invalid cone: theta0 {theta0}, eps0 {eps0}")));
        }
        Ok(Self { theta0: wrap_angle(theta0), eps0 })
    }

    /// Direction in `(-pi, pi]`.
    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    pub fn eps0(&self) -> f64 {
        self.eps0
    }
}

/// Maps an angle into `(-pi, pi]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t - 2.0 * PI
    } else {
        t
    }
}

/// Winding number of the closed polygon `poly` around `w`; 0 when `w` sits
/// on an edge.
fn polygon_winding(poly: &[Complex64], w: Complex64) -> i64 {
    let mut total = 0.0;
    for (k, &a) in poly.iter().enumerate() {
        let b = poly[(k + 1) % poly.len()];
        let t = (b - w) * (a - w).conj();
        if t.re <= 0.0 && t.im.abs() <= 1e-14 * (b - w).norm() * (a - w).norm() {
            return 0;
        }
        total += t.arg();
    }
    (total / (2.0 * PI)).round() as i64
}

/// Finite-box exterior cone certificate for the sampled range.
///
/// Every test point `z0 + r e^{i theta}` (radii log-spaced in
/// `(margin * eps0, eps0)`, angles uniform in the cone's opening) must stay
/// further than `2 * L_s * step` from each sampled value `v_s`, where the
/// local Lipschitz bound `L_s` is estimated from neighbouring grid values.
/// Returns `Ok(false)` when a test point is covered by the image of a grid
/// cell (nonzero winding of the cell's corner polygon), and
/// `Err(ConeInconclusive)` when a test point is merely within the band.
pub fn exterior_cone_check(sample: &RangeSample, z0: Complex64, cone: ConeSpec, margin: f64) -> Result<bool> {
    if !(margin > 0.0 && margin < 1.0) {
        return Err(Error::InvalidArgument(format!("margin must lie in (0, 1), got {margin}")));
    }
    let n = sample.nodes_per_axis;
    let v = &sample.values;
    let eps0 = cone.eps0();

    let (lo, hi) = ((margin * eps0).ln(), eps0.ln());
    let tests: Vec<Complex64> = (0..CONE_RADII)
        .flat_map(|a| {
            let r = (lo + (hi - lo) * (a + 1) as f64 / (CONE_RADII + 1) as f64).exp();
            (0..CONE_ANGLES).map(move |b| {
                let th = cone.theta0() - eps0 + 2.0 * eps0 * (b + 1) as f64 / (CONE_ANGLES + 1) as f64;
                z0 + Complex64::from_polar(r, th)
            })
        })
        .collect();

    let band = |i: usize, j: usize| -> f64 {
        let here = v[i * n + j];
        let mut worst: f64 = 0.0;
        if i > 0 {
            worst = worst.max((v[(i - 1) * n + j] - here).norm());
        }
        if i + 1 < n {
            worst = worst.max((v[(i + 1) * n + j] - here).norm());
        }
        if j > 0 {
            worst = worst.max((v[i * n + j - 1] - here).norm());
        }
        if j + 1 < n {
            worst = worst.max((v[i * n + j + 1] - here).norm());
        }
        2.0 * worst
    };

    // only values that can reach the test region matter
    let relevant: Vec<(Complex64, f64)> = (0..n * n)
        .into_par_iter()
        .filter_map(|idx| {
            let (i, j) = (idx / n, idx % n);
            let b = band(i, j);
            ((v[idx] - z0).norm() <= eps0 + b).then_some((v[idx], b))
        })
        .collect();

    let unclear: Vec<Complex64> = tests
        .iter()
        .copied()
        .filter(|&w| relevant.iter().any(|&(s, b)| (w - s).norm() <= b))
        .collect();
    if unclear.is_empty() {
        return Ok(true);
    }

    let covered = (0..(n - 1) * (n - 1)).into_par_iter().any(|cell| {
        let (i, j) = (cell / (n - 1), cell % (n - 1));
        let poly = [v[i * n + j], v[(i + 1) * n + j], v[(i + 1) * n + j + 1], v[i * n + j + 1]];
        let (mut rmin, mut rmax, mut imin, mut imax) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for z in &poly {
            rmin = rmin.min(z.re);
            rmax = rmax.max(z.re);
            imin = imin.min(z.im);
            imax = imax.max(z.im);
        }
        unclear.iter().any(|w| {
            w.re >= rmin
                && w.re <= rmax
                && w.im >= imin
                && w.im <= imax
                && poly.iter().all(|&z| z != *w)
                && polygon_winding(&poly, *w) != 0
        })
    });
    if covered {
        Ok(false)
    } else {
        Err(Error::ConeInconclusive { point: unclear[0] })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::parse_symbol;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn davies(alpha: f64) -> PolySymbol {
        PolySymbol::from_terms([
            ((0, 2), Complex64::new(1.0, 0.0)),
            ((2, 0), Complex64::from_polar(1.0, alpha)),
        ])
    }

    #[test]
    fn davies_range_lies_in_sector() {
        let s = sample_range(&davies(FRAC_PI_4), 2.0, 0.05).unwrap();
        for z in &s.values {
            if z.norm() > 0.0 {
                let a = z.arg();
                assert!(a >= -1e-12 && a <= FRAC_PI_4 + 1e-12, "{z}");
            }
        }
    }

    #[test]
    fn harmonic_range_is_nonnegative_reals() {
        let s = sample_range(&parse_symbol("x^2 + xi^2").unwrap(), 1.5, 0.1).unwrap();
        assert_eq!(s.nodes_per_axis, 31);
        for z in &s.values {
            assert_eq!(z.im, 0.0);
            assert!(z.re >= 0.0 && z.re <= 2.0 * 1.5 * 1.5 + 1e-12);
        }
    }

    #[test]
    fn full_plane_quadratic_covers_all_arguments() {
        let s = sample_range(&parse_symbol("(x - 1i*xi)*(x - 2i*xi)").unwrap(), 1.0, 0.01).unwrap();
        let bins = (2.0 * PI / 0.1).ceil() as usize;
        let mut hit = vec![false; bins];
        for z in &s.values {
            if z.norm() > 0.0 {
                let k = (((z.arg() + PI) / 0.1) as usize).min(bins - 1);
                hit[k] = true;
            }
        }
        assert!(hit.iter().all(|&h| h));
    }

    #[test]
    fn node_coordinates_are_row_major() {
        let p = parse_symbol("x + 10*xi").unwrap();
        let s = sample_range(&p, 1.0, 0.5).unwrap();
        assert_eq!(s.nodes_per_axis, 5);
        assert_eq!(s.node(0), (-1.0, -1.0));
        assert_eq!(s.node(1), (-1.0, -0.5));
        assert_eq!(s.node(5), (-0.5, -1.0));
        for (idx, z) in s.values.iter().enumerate() {
            let (x, xi) = s.node(idx);
            assert_eq!(*z, p.eval_real(x, xi));
        }
    }

    #[test]
    fn sample_budget_and_bad_steps() {
        let p = parse_symbol("x").unwrap();
        assert!(matches!(sample_range(&p, 10.0, 1e-3), Err(Error::SampleBudget { .. })));
        assert!(sample_range(&p, 1.0, 0.0).is_err());
        assert!(sample_range(&p, 1.0, 2.0).is_err());
    }

    #[test]
    fn cone_spec_normalizes_direction() {
        let c = ConeSpec::new(3.0 * PI, 0.1).unwrap();
        assert!((c.theta0() - PI).abs() < 1e-12);
        assert!((ConeSpec::new(-PI, 0.1).unwrap().theta0() - PI).abs() < 1e-12);
        assert!(ConeSpec::new(0.0, 0.0).is_err());
    }

    #[test]
    fn davies_exterior_cone_along_negative_axis() {
        let s = sample_range(&davies(FRAC_PI_4), 4.0, 0.02).unwrap();
        let cone = ConeSpec::new(PI, 0.3).unwrap();
        assert_eq!(exterior_cone_check(&s, Complex64::new(0.0, 0.0), cone, 0.1), Ok(true));
    }

    #[test]
    fn davies_interior_direction_fails() {
        let s = sample_range(&davies(FRAC_PI_4), 4.0, 0.02).unwrap();
        let cone = ConeSpec::new(FRAC_PI_4 / 2.0, 0.1).unwrap();
        assert_eq!(exterior_cone_check(&s, Complex64::new(0.0, 0.0), cone, 0.1), Ok(false));
    }

    #[test]
    fn fig1_exterior_cone_opposite_bisector() {
        let p = parse_symbol("xi^2 + (1+3i)*x^2 + x^4").unwrap();
        let s = sample_range(&p, 2.0, 0.005).unwrap();
        let cone = ConeSpec::new(3f64.atan() / 2.0 + PI, 0.3).unwrap();
        assert_eq!(exterior_cone_check(&s, Complex64::new(0.0, 0.0), cone, 0.1), Ok(true));
    }

    #[test]
    fn boundary_ray_is_inconclusive_or_false() {
        // test cone straddling the sector edge arg z = 0
        let s = sample_range(&davies(FRAC_PI_4), 2.0, 0.02).unwrap();
        let cone = ConeSpec::new(-0.05, 0.06).unwrap();
        assert_ne!(exterior_cone_check(&s, Complex64::new(0.0, 0.0), cone, 0.1), Ok(true));
    }

    #[test]
    fn inconclusive_when_band_swallows_test_points() {
        // a very coarse grid: test points sit inside the uncertainty band of
        // samples but no cell covers them
        let p = parse_symbol("x^2 + xi^2 + 1").unwrap();
        let s = sample_range(&p, 1.0, 0.9).unwrap();
        let cone = ConeSpec::new(PI, 0.5).unwrap();
        let got = exterior_cone_check(&s, Complex64::new(1.0, 0.0), cone, 0.5);
        assert!(matches!(got, Err(Error::ConeInconclusive { .. })), "{got:?}");
    }
}
