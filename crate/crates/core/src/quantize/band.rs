use num_complex::Complex64;

use crate::linalg::CMatrix;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Square complex band matrix with `lower` subdiagonals and `upper`
/// superdiagonals. Row `i` stores columns `i - lower ..= i + upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandMatrix {
    n: usize,
    lower: usize,
    upper: usize,
    data: Vec<Complex64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, lower: usize, upper: usize) -> Self {
        Self { n, lower, upper, data: vec![ZERO; n * (lower + upper + 1)] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, 0, 0);
        m.data.fill(Complex64::new(1.0, 0.0));
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bandwidths(&self) -> (usize, usize) {
        (self.lower, self.upper)
    }

    fn width(&self) -> usize {
        self.lower + self.upper + 1
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        if j + self.lower < i || j > i + self.upper || i >= self.n || j >= self.n {
            None
        } else {
            Some(i * self.width() + (j + self.lower - i))
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.slot(i, j).map_or(ZERO, |s| self.data[s])
    }

    /// Panics if `(i, j)` lies outside the band.
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        let s = self.slot(i, j).expect("entry outside band");
        self.data[s] = v;
    }

    /// Columns of row `i` that lie inside both the band and the matrix.
    fn row_range(&self, i: usize) -> std::ops::RangeInclusive<usize> {
        i.saturating_sub(self.lower)..=(i + self.upper).min(self.n - 1)
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let mut out = Self::zeros(self.n, self.lower + other.lower, self.upper + other.upper);
        let w = out.width();
        for i in 0..self.n {
            for k in self.row_range(i) {
                let a = self.data[i * self.width() + (k + self.lower - i)];
                if a == ZERO {
                    continue;
                }
                for j in other.row_range(k) {
                    let b = other.data[k * other.width() + (j + other.lower - k)];
                    out.data[i * w + (j + out.lower - i)] += a * b;
                }
            }
        }
        out
    }

    /// `self += s * other`, widening the band if needed.
    pub fn add_scaled(&mut self, other: &Self, s: Complex64) {
        assert_eq!(self.n, other.n, "dimension mismatch");
        if other.lower > self.lower || other.upper > self.upper {
            let mut wider = Self::zeros(self.n, self.lower.max(other.lower), self.upper.max(other.upper));
            wider.add_scaled(self, Complex64::new(1.0, 0.0));
            *self = wider;
        }
        for i in 0..other.n {
            for j in other.row_range(i) {
                let v = other.data[i * other.width() + (j + other.lower - i)];
                let slot = i * self.width() + (j + self.lower - i);
                self.data[slot] += s * v;
            }
        }
    }

    /// Leading `k x k` block as a dense matrix.
    pub fn to_dense(&self, k: usize) -> CMatrix {
        assert!(k <= self.n);
        let mut m = CMatrix::zeros(k);
        for i in 0..k {
            for j in self.row_range(i) {
                if j < k {
                    m[(i, j)] = self.get(i, j);
                }
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn product_matches_dense() {
        let n = 7;
        let mut a = BandMatrix::zeros(n, 1, 2);
        let mut b = BandMatrix::zeros(n, 2, 0);
        for i in 0..n {
            for j in 0..n {
                let v = c((i * 3 + j) as f64 * 0.1, (i as f64 - j as f64) * 0.2);
                if a.slot(i, j).is_some() {
                    a.set(i, j, v);
                }
                if b.slot(i, j).is_some() {
                    b.set(i, j, v.conj());
                }
            }
        }
        let dense = a.to_dense(n).matmul(&b.to_dense(n));
        assert!(a.mul(&b).to_dense(n).max_abs_diff(&dense) < 1e-14);
        assert_eq!(a.mul(&b).bandwidths(), (3, 2));
    }

    #[test]
    fn add_scaled_widens() {
        let mut a = BandMatrix::identity(4);
        let mut b = BandMatrix::zeros(4, 0, 1);
        b.set(0, 1, c(1.0, 0.0));
        a.add_scaled(&b, c(0.0, 2.0));
        assert_eq!(a.get(0, 1), c(0.0, 2.0));
        assert_eq!(a.get(2, 2), c(1.0, 0.0));
        assert_eq!(a.get(3, 0), ZERO);
    }
}
