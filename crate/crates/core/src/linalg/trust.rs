use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub const DEFAULT_MATCH_TOL: f64 = 1e-6;

/// Low-resolution eigenvalues, each flagged by whether it persists at the
/// higher resolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueCloud {
    pub values: Vec<Complex64>,
    pub trusted: Vec<bool>,
    /// Distance to the matched high-resolution partner, if any.
    pub shifts: Vec<Option<f64>>,
    pub basis_pair: (usize, usize),
    pub match_tol: f64,
    pub h: f64,
}

impl EigenvalueCloud {
    pub fn trusted_values(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.values.iter().zip(&self.trusted).filter(|(_, &t)| t).map(|(v, _)| *v)
    }

    pub fn trusted_count(&self) -> usize {
        self.trusted.iter().filter(|&&t| t).count()
    }

    /// Keeps only values with `|z - center| <= radius`.
    pub fn restrict_to_disc(&self, center: Complex64, radius: f64) -> Self {
        let keep: Vec<usize> = (0..self.values.len()).filter(|&i| (self.values[i] - center).norm() <= radius).collect();
        Self {
            values: keep.iter().map(|&i| self.values[i]).collect(),
            trusted: keep.iter().map(|&i| self.trusted[i]).collect(),
            shifts: keep.iter().map(|&i| self.shifts[i]).collect(),
            ..self.clone()
        }
    }

    /// Values sorted by distance to `center`, ties broken by real then
    /// imaginary part so the order is deterministic.
    pub fn sorted_by_distance(&self, center: Complex64) -> Self {
        let mut idx: Vec<usize> = (0..self.values.len()).collect();
        idx.sort_by(|&a, &b| {
            let (za, zb) = (self.values[a], self.values[b]);
            (za - center)
                .norm()
                .total_cmp(&(zb - center).norm())
                .then(za.re.total_cmp(&zb.re))
                .then(za.im.total_cmp(&zb.im))
        });
        Self {
            values: idx.iter().map(|&i| self.values[i]).collect(),
            trusted: idx.iter().map(|&i| self.trusted[i]).collect(),
            shifts: idx.iter().map(|&i| self.shifts[i]).collect(),
            ..self.clone()
        }
    }
}

/// Matches `low` against `high` greedily in order of increasing relative
/// distance `|l - h| / (|l| + h)`, each high value used at most once. A low
/// value is trusted iff it is matched, i.e. its partner lies within
/// `tol * (|value| + h)`.
pub fn filter_trusted(low: &[Complex64], high: &[Complex64], h: f64, tol: f64) -> EigenvalueCloud {
    let mut pairs: Vec<(f64, usize, usize, f64)> = Vec::new();
    for (i, l) in low.iter().enumerate() {
        let limit = tol * (l.norm() + h);
        for (j, g) in high.iter().enumerate() {
            let d = (l - g).norm();
            if d <= limit {
                pairs.push((d / (l.norm() + h), i, j, d));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let mut shifts = vec![None; low.len()];
    let mut used = vec![false; high.len()];
    for (_, i, j, d) in pairs {
        if shifts[i].is_none() && !used[j] {
            shifts[i] = Some(d);
            used[j] = true;
        }
    }
    EigenvalueCloud {
        values: low.to_vec(),
        trusted: shifts.iter().map(Option::is_some).collect(),
        shifts,
        basis_pair: (low.len(), high.len()),
        match_tol: tol,
        h,
    }
}
