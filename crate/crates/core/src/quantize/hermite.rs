use num_complex::Complex64;

use super::band::BandMatrix;
use super::{Basis, OperatorMatrix};
use crate::error::{Error, Result};
use crate::symbols::{PolySymbol, DEFAULT_MAX_DEGREE};

pub const MAX_ASSEMBLY_DIMENSION: usize = 8192;

/// Truncated eigenbasis of `(x^2 + (hD)^2) / 2`: `n` retained functions,
/// assembled with `assembly_pad` extra ones so that products of band matrices
/// are exact on the retained block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermiteBasisSpec {
    pub h: f64,
    pub n: usize,
    pub assembly_pad: usize,
}

impl HermiteBasisSpec {
    pub fn new(h: f64, n: usize, assembly_pad: usize) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidArgument(format!("h must be positive, got {h}")));
        }
        if n < 2 {
            return Err(Error::InvalidArgument(format!("basis size must be at least 2, got {n}")));
        }
        if n + assembly_pad > MAX_ASSEMBLY_DIMENSION {
            return Err(Error::InvalidArgument(format!(
                "assembly dimension {} exceeds {MAX_ASSEMBLY_DIMENSION}",
                n + assembly_pad
            )));
        }
        Ok(Self { h, n, assembly_pad })
    }

    /// Pad equal to the total degree of `p`, the smallest that is exact.
    pub fn for_symbol(h: f64, n: usize, p: &PolySymbol) -> Result<Self> {
        Self::new(h, n, p.degree() as usize)
    }

    pub fn assembly_dimension(&self) -> usize {
        self.n + self.assembly_pad
    }
}

/// `X = sqrt(h/2)(A + A^*)` and `P = sqrt(h/2)(A - A^*)/i` with
/// `A e_k = sqrt(k) e_{k-1}`, at the padded dimension.
pub fn ladder_matrices(spec: &HermiteBasisSpec) -> (BandMatrix, BandMatrix) {
    let m = spec.assembly_dimension();
    let s = (spec.h / 2.0).sqrt();
    let mut x = BandMatrix::zeros(m, 1, 1);
    let mut p = BandMatrix::zeros(m, 1, 1);
    for k in 1..m {
        let v = s * (k as f64).sqrt();
        // A has (k-1, k) entry sqrt(k); A^* has (k, k-1)
        x.set(k - 1, k, Complex64::new(v, 0.0));
        x.set(k, k - 1, Complex64::new(v, 0.0));
        p.set(k - 1, k, Complex64::new(0.0, -v));
        p.set(k, k - 1, Complex64::new(0.0, v));
    }
    (x, p)
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Powers `m^0 ..= m^max`.
fn powers(m: &BandMatrix, max: u32) -> Vec<BandMatrix> {
    let mut out = vec![BandMatrix::identity(m.n())];
    for e in 1..=max as usize {
        out.push(out[e - 1].mul(m));
    }
    out
}

/// Weyl quantization in the Hermite basis. Each monomial `x^j xi^k` becomes
/// `2^-j sum_r C(j, r) X^r P^k X^(j-r)`, assembled at the padded dimension
/// and truncated to `n x n`.
pub fn weyl_quantize_hermite(p: &PolySymbol, spec: &HermiteBasisSpec) -> Result<OperatorMatrix> {
    let degree = p.degree();
    if degree > DEFAULT_MAX_DEGREE {
        return Err(Error::DegreeCap { degree, cap: DEFAULT_MAX_DEGREE });
    }
    if spec.assembly_pad < degree as usize {
        return Err(Error::PadTooSmall { pad: spec.assembly_pad, degree });
    }
    let (x, pm) = ladder_matrices(spec);
    let max_j = p.coeffs().keys().map(|&(j, _)| j).max().unwrap_or(0);
    let max_k = p.coeffs().keys().map(|&(_, k)| k).max().unwrap_or(0);
    let xp = powers(&x, max_j);
    let pp = powers(&pm, max_k);

    let mut acc = BandMatrix::zeros(spec.assembly_dimension(), 0, 0);
    for (&(j, k), &coeff) in p.coeffs() {
        let weight = coeff * 0.5f64.powi(j as i32);
        for r in 0..=j {
            let term = xp[r as usize].mul(&pp[k as usize]).mul(&xp[(j - r) as usize]);
            acc.add_scaled(&term, weight * binomial(j, r));
        }
    }
    let entries = acc.to_dense(spec.n);
    if !entries.is_finite() {
        return Err(Error::InvalidArgument("quantized matrix has non-finite entries".into()));
    }
    Ok(OperatorMatrix {
        entries,
        basis: Basis::Hermite { h: spec.h, n: spec.n },
        symbol_fingerprint: p.fingerprint(),
    })
}
