use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::QuadForm;
use crate::error::{Error, Result};

/// Range of a quadratic form on `R^2`: either all of `C`, or a closed convex
/// cone of aperture below `pi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RangeClass {
    FullPlane { winding: i64 },
    ProperCone { bisector: f64, half_aperture: f64 },
}

const BASE_SAMPLES: usize = 4096;
const MAX_REFINEMENTS: usize = 3;

/// `q(cos t, sin t) = center + u cos 2t + v sin 2t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeEllipse {
    pub center: Complex64,
    pub u: Complex64,
    pub v: Complex64,
}

impl RangeEllipse {
    pub fn point(&self, t: f64) -> Complex64 {
        self.center + self.u * (2.0 * t).cos() + self.v * (2.0 * t).sin()
    }
}

pub fn range_ellipse(q: &QuadForm) -> RangeEllipse {
    let a = q.hxx * 0.5;
    let b = q.hxixi * 0.5;
    RangeEllipse { center: (a + b) * 0.5, u: (a - b) * 0.5, v: q.hxxi * 0.5 }
}

/// Whether `q` vanishes at some nonzero real point.
fn has_real_zero(q: &QuadForm) -> bool {
    let scale = q.frobenius_norm();
    if scale == 0.0 {
        return true;
    }
    // q(r, 1) = (hxx r^2 + 2 hxxi r + hxixi) / 2; q(1, 0) = hxx / 2
    if q.hxx.norm() <= 1e-14 * scale {
        return true;
    }
    let disc = (q.hxxi * q.hxxi - q.hxx * q.hxixi).sqrt();
    [(-q.hxxi + disc) / q.hxx, (-q.hxxi - disc) / q.hxx]
        .iter()
        .any(|r| r.im.abs() <= 1e-10 * (1.0 + r.norm()))
}

fn circle_value(q: &QuadForm, t: f64) -> Complex64 {
    q.eval(Complex64::new(t.cos(), 0.0), Complex64::new(t.sin(), 0.0))
}

/// Winding number of `q(cos t, sin t)`, `t in [0, 2 pi)`, about the origin,
/// and the unwrapped argument along the samples.
fn winding(q: &QuadForm, samples: usize) -> (f64, Vec<f64>) {
    let values: Vec<Complex64> = (0..samples)
        .map(|k| circle_value(q, 2.0 * PI * k as f64 / samples as f64))
        .collect();
    let mut phase = Vec::with_capacity(samples);
    let mut acc = values[0].arg();
    phase.push(acc);
    for k in 1..=samples {
        acc += (values[k % samples] / values[k - 1]).arg();
        if k < samples {
            phase.push(acc);
        }
    }
    ((acc - values[0].arg()) / (2.0 * PI), phase)
}

/// Golden-section search for an extremum of the argument near `t0`, using a
/// continuous branch anchored at `phase0`.
fn refine_extreme(q: &QuadForm, t0: f64, phase0: f64, width: f64, maximize: bool) -> f64 {
    let z0 = circle_value(q, t0);
    let f = |t: f64| {
        let v = phase0 + (circle_value(q, t) / z0).arg();
        if maximize {
            -v
        } else {
            v
        }
    };
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (t0 - width, t0 + width);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc < fd {
            b = d;
            (d, fd) = (c, fc);
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            (c, fc) = (d, fd);
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let best = f(0.5 * (a + b)).min(f(t0));
    if maximize {
        -best
    } else {
        best
    }
}

/// Decides between a full-plane range (winding `+-2` on the unit circle) and
/// a proper cone (winding 0). Forms with a nonzero real zero are rejected.
pub fn classify_range(q: &QuadForm) -> Result<RangeClass> {
    if has_real_zero(q) {
        return Err(Error::RealZero);
    }
    let mut samples = BASE_SAMPLES;
    let mut last = 0;
    for _ in 0..=MAX_REFINEMENTS {
        let (w, phase) = winding(q, samples);
        let n = w.round() as i64;
        last = n;
        if n == 2 || n == -2 {
            return Ok(RangeClass::FullPlane { winding: n });
        }
        if n == 0 {
            let dt = 2.0 * PI / samples as f64;
            let (imin, imax) = phase.iter().enumerate().fold((0, 0), |(lo, hi), (k, &p)| {
                (if p < phase[lo] { k } else { lo }, if p > phase[hi] { k } else { hi })
            });
            let lo = refine_extreme(q, imin as f64 * dt, phase[imin], dt, false);
            let hi = refine_extreme(q, imax as f64 * dt, phase[imax], dt, true);
            let mid = 0.5 * (lo + hi);
            return Ok(RangeClass::ProperCone {
                bisector: crate::symbols::wrap_angle(mid),
                half_aperture: 0.5 * (hi - lo),
            });
        }
        samples *= 4;
    }
    Err(Error::Winding(last))
}
