//! Matrix discretizations of `p^w(x, hD)`: exact Weyl quantization in a
//! truncated Hermite basis, a Chebyshev collocation for `xi^2 + V(x)`, and
//! the dilation `x = eps y` with `h~ = h / eps^2`.

mod band;
mod chebyshev;
mod hermite;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::symbols::PolySymbol;

pub use band::BandMatrix;
pub use chebyshev::{chebyshev_schrodinger, ChebyshevGridSpec};
pub use hermite::{ladder_matrices, weyl_quantize_hermite, HermiteBasisSpec, MAX_ASSEMBLY_DIMENSION};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Basis {
    Hermite { h: f64, n: usize },
    Chebyshev { l: f64, n: usize, h: f64 },
}

impl Basis {
    pub fn name(&self) -> &'static str {
        match self {
            Basis::Hermite { .. } => "hermite",
            Basis::Chebyshev { .. } => "chebyshev",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub entries: CMatrix,
    pub basis: Basis,
    pub symbol_fingerprint: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingSpec {
    pub eps: f64,
    pub h: f64,
    pub h_tilde: f64,
}

impl ScalingSpec {
    pub fn new(eps: f64, h: f64) -> Result<Self> {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::InvalidArgument(format!("eps must lie in (0, 1], got {eps}")));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidArgument(format!("h must be positive, got {h}")));
        }
        Ok(Self { eps, h, h_tilde: h / (eps * eps) })
    }
}

/// `p_eps(y, eta) = eps^-2 p(eps y, eps eta)`: the coefficient of
/// `x^j xi^k` is multiplied by `eps^(j + k - 2)`.
pub fn scale_symbol(p: &PolySymbol, s: &ScalingSpec) -> PolySymbol {
    PolySymbol::from_terms(
        p.coeffs()
            .iter()
            .map(|(&(j, k), &c)| ((j, k), c * s.eps.powi(j as i32 + k as i32 - 2))),
    )
}
