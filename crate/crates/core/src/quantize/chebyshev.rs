use std::f64::consts::PI;

use num_complex::Complex64;

use super::{Basis, OperatorMatrix};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::symbols::PolySymbol;

/// Chebyshev points on `[-l, l]`; `n + 1` nodes, `n - 1` interior unknowns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChebyshevGridSpec {
    pub l: f64,
    pub n: usize,
    pub h: f64,
}

impl ChebyshevGridSpec {
    pub fn new(l: f64, n: usize, h: f64) -> Result<Self> {
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::InvalidArgument(format!("half-width must be positive, got {l}")));
        }
        if n < 8 {
            return Err(Error::InvalidArgument(format!("need at least 8 Chebyshev points, got {n}")));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidArgument(format!("h must be positive, got {h}")));
        }
        if h.sqrt() > 0.25 * l {
            log::warn!("eigenfunction scale sqrt(h) = {} is not small against L = {l}", h.sqrt());
        }
        Ok(Self { l, n, h })
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.n).map(|j| self.l * (PI * j as f64 / self.n as f64).cos()).collect()
    }
}

/// Differentiation matrix on the `n + 1` points `cos(pi j / n)` of `[-1, 1]`,
/// row-major, diagonal from the negative row sums.
fn cheb_matrix(n: usize) -> Vec<f64> {
    let m = n + 1;
    let x: Vec<f64> = (0..m).map(|j| (PI * j as f64 / n as f64).cos()).collect();
    let c: Vec<f64> = (0..m)
        .map(|j| {
            let w = if j == 0 || j == n { 2.0 } else { 1.0 };
            if j % 2 == 0 {
                w
            } else {
                -w
            }
        })
        .collect();
    let mut d = vec![0.0; m * m];
    for i in 0..m {
        let mut row_sum = 0.0;
        for j in 0..m {
            if i != j {
                let v = c[i] / c[j] / (x[i] - x[j]);
                d[i * m + j] = v;
                row_sum += v;
            }
        }
        d[i * m + i] = -row_sum;
    }
    d
}

/// Potential `V` of a symbol `xi^2 + V(x)`; anything else is rejected.
fn schrodinger_potential(p: &PolySymbol) -> Result<PolySymbol> {
    if p.coeff(0, 2) != Complex64::new(1.0, 0.0) {
        return Err(Error::NotSchrodinger);
    }
    let v = p.sub(&PolySymbol::monomial(0, 2, Complex64::new(1.0, 0.0)));
    if !v.is_x_only() {
        return Err(Error::NotSchrodinger);
    }
    Ok(v)
}

/// `-h^2 D^2 + V` with Dirichlet conditions: the interior block of the
/// squared Chebyshev differentiation matrix plus the potential at the
/// interior nodes. The symbol must be exactly `xi^2 + V(x)`.
pub fn chebyshev_schrodinger(p: &PolySymbol, grid: &ChebyshevGridSpec) -> Result<OperatorMatrix> {
    let v = schrodinger_potential(p)?;
    let n = grid.n;
    let m = n + 1;
    let d = cheb_matrix(n);
    let scale = grid.h * grid.h / (grid.l * grid.l);
    let nodes = grid.nodes();

    let size = n - 1;
    let mut entries = CMatrix::zeros(size);
    // (D^2)_{ij} restricted to interior rows and columns 1..n-1
    for i in 1..n {
        let mut row = vec![0.0; m];
        for k in 0..m {
            let a = d[i * m + k];
            if a != 0.0 {
                for (r, b) in row.iter_mut().zip(&d[k * m..(k + 1) * m]) {
                    *r += a * b;
                }
            }
        }
        for j in 1..n {
            entries[(i - 1, j - 1)] = Complex64::new(-scale * row[j], 0.0);
        }
        entries[(i - 1, i - 1)] += v.eval_real(nodes[i], 0.0);
    }
    Ok(OperatorMatrix {
        entries,
        basis: Basis::Chebyshev { l: grid.l, n, h: grid.h },
        symbol_fingerprint: p.fingerprint(),
    })
}
