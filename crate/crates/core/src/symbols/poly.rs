use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadratics::QuadForm;

/// Default cap on the total degree of a symbol.
pub const DEFAULT_MAX_DEGREE: u32 = 16;

/// Bivariate complex polynomial `p(x, xi)` stored as a sparse map from
/// `(deg_x, deg_xi)` to its coefficient. Zero coefficients are never stored.
#[derive(Debug, Clone, Default)]
pub struct PolySymbol {
    coeffs: BTreeMap<(u32, u32), Complex64>,
    source_text: Option<String>,
}

impl PartialEq for PolySymbol {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl PolySymbol {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Complex64) -> Self {
        Self::from_terms([((0, 0), c)])
    }

    pub fn monomial(deg_x: u32, deg_xi: u32, c: Complex64) -> Self {
        Self::from_terms([((deg_x, deg_xi), c)])
    }

    /// Builds a symbol from `(deg_x, deg_xi) -> coefficient` pairs, summing
    /// repeated keys and dropping zeros.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = ((u32, u32), Complex64)>,
    {
        let mut coeffs = BTreeMap::new();
        for (key, c) in terms {
            *coeffs.entry(key).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        coeffs.retain(|_, c| c.norm_sqr() != 0.0);
        Self { coeffs, source_text: None }
    }

    pub fn with_source(mut self, text: impl Into<String>) -> Self {
        self.source_text = Some(text.into());
        self
    }

    pub fn source_text(&self) -> Option<&str> {
        self.source_text.as_deref()
    }

    pub fn coeffs(&self) -> &BTreeMap<(u32, u32), Complex64> {
        &self.coeffs
    }

    pub fn coeff(&self, deg_x: u32, deg_xi: u32) -> Complex64 {
        self.coeffs.get(&(deg_x, deg_xi)).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.coeffs.keys().map(|(j, k)| j + k).max().unwrap_or(0)
    }

    pub fn one_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).sum()
    }

    /// True when no term involves `xi`.
    pub fn is_x_only(&self) -> bool {
        self.coeffs.keys().all(|&(_, k)| k == 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_terms(self.coeffs.iter().chain(other.coeffs.iter()).map(|(&k, &c)| (k, c)))
    }

    pub fn neg(&self) -> Self {
        self.scale(Complex64::new(-1.0, 0.0))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_terms(self.coeffs.iter().map(|(&k, &c)| (k, c * s)))
    }

    /// Product, rejecting results whose total degree exceeds `cap`.
    pub fn mul(&self, other: &Self, cap: u32) -> Result<Self> {
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero());
        }
        let degree = self.degree() + other.degree();
        if degree > cap {
            return Err(Error::DegreeCap { degree, cap });
        }
        let mut terms = Vec::with_capacity(self.coeffs.len() * other.coeffs.len());
        for (&(j1, k1), &a) in &self.coeffs {
            for (&(j2, k2), &b) in &other.coeffs {
                terms.push(((j1 + j2, k1 + k2), a * b));
            }
        }
        Ok(Self::from_terms(terms))
    }

    pub fn pow(&self, exp: u32, cap: u32) -> Result<Self> {
        let degree = u64::from(self.degree()) * u64::from(exp);
        if degree > u64::from(cap) {
            return Err(Error::DegreeCap { degree: degree.min(u64::from(u32::MAX)) as u32, cap });
        }
        let mut result = Self::constant(Complex64::new(1.0, 0.0));
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base, cap)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, u32::MAX)?;
            }
        }
        Ok(result)
    }

    /// Term-wise partial derivative of order `dx` in `x` and `dxi` in `xi`.
    pub fn derivative(&self, dx: u32, dxi: u32) -> Self {
        let falling = |n: u32, m: u32| -> f64 { (0..m).map(|i| f64::from(n - i)).product() };
        Self::from_terms(self.coeffs.iter().filter(|(&(j, k), _)| j >= dx && k >= dxi).map(
            |(&(j, k), &c)| ((j - dx, k - dxi), c * falling(j, dx) * falling(k, dxi)),
        ))
    }

    /// Horner evaluation: inner polynomial in `xi` per power of `x`, then
    /// Horner in `x`.
    pub fn eval(&self, x: Complex64, xi: Complex64) -> Complex64 {
        let Some(&(max_j, _)) = self.coeffs.keys().next_back() else {
            return Complex64::new(0.0, 0.0);
        };
        let mut acc = Complex64::new(0.0, 0.0);
        let mut iter = self.coeffs.iter().rev().peekable();
        for j in (0..=max_j).rev() {
            // coefficients with this power of x, in decreasing xi degree
            let mut inner = Complex64::new(0.0, 0.0);
            let mut last_k: Option<u32> = None;
            while let Some(&(&(jj, k), &c)) = iter.peek() {
                if jj != j {
                    break;
                }
                if let Some(prev) = last_k {
                    for _ in k..prev {
                        inner *= xi;
                    }
                }
                inner += c;
                last_k = Some(k);
                iter.next();
            }
            if let Some(k) = last_k {
                for _ in 0..k {
                    inner *= xi;
                }
            }
            acc = acc * x + inner;
        }
        acc
    }

    pub fn eval_real(&self, x: f64, xi: f64) -> Complex64 {
        self.eval(Complex64::new(x, 0.0), Complex64::new(xi, 0.0))
    }

    /// `(dp/dx, dp/dxi)` at `(x, xi)`.
    pub fn gradient(&self, x: Complex64, xi: Complex64) -> (Complex64, Complex64) {
        (self.derivative(1, 0).eval(x, xi), self.derivative(0, 1).eval(x, xi))
    }

    /// Matrix of second partials at a real point.
    pub fn hessian_at(&self, x0: f64, xi0: f64) -> QuadForm {
        let x = Complex64::new(x0, 0.0);
        let xi = Complex64::new(xi0, 0.0);
        QuadForm::new(
            self.derivative(2, 0).eval(x, xi),
            self.derivative(1, 1).eval(x, xi),
            self.derivative(0, 2).eval(x, xi),
        )
    }

    /// Hash of the canonical coefficient map (bitwise on the floats).
    pub fn fingerprint(&self) -> u64 {
        let mut hasher = std::collections::hash_map::DefaultHasher::new();
        for (&(j, k), c) in &self.coeffs {
            (j, k, c.re.to_bits(), c.im.to_bits()).hash(&mut hasher);
        }
        hasher.finish()
    }
}

fn fmt_coeff(c: Complex64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if c.im == 0.0 {
        write!(f, "({})", c.re)
    } else if c.re == 0.0 {
        write!(f, "({}i)", c.im)
    } else if c.im < 0.0 {
        write!(f, "({}-{}i)", c.re, -c.im)
    } else {
        write!(f, "({}+{}i)", c.re, c.im)
    }
}

/// Prints in the input grammar; parsing the output reproduces the symbol.
impl fmt::Display for PolySymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (n, (&(j, k), &c)) in self.coeffs.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            fmt_coeff(c, f)?;
            match j {
                0 => {}
                1 => write!(f, "*x")?,
                _ => write!(f, "*x^{j}")?,
            }
            match k {
                0 => {}
                1 => write!(f, "*xi")?,
                _ => write!(f, "*xi^{k}")?,
            }
        }
        Ok(())
    }
}
