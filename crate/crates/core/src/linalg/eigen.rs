//! Eigenvalues of dense complex matrices: diagonal balancing, Householder
//! reduction to Hessenberg form, then single-shift complex QR with
//! Wilkinson shifts on the active window.

use num_complex::Complex64;

use super::CMatrix;
use crate::error::{Error, Result};

pub const MAX_DIMENSION: usize = 4096;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn cabs1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Scales rows and columns by powers of two so that off-diagonal row and
/// column 1-norms are comparable. A similarity, exact in floating point.
pub fn balance(a: &mut CMatrix) {
    const RADIX: f64 = 2.0;
    let n = a.n();
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += cabs1(a[(j, i)]);
                    r += cabs1(a[(i, j)]);
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX * RADIX;
            }
            g = r * RADIX;
            while c >= g {
                f /= RADIX;
                c /= RADIX * RADIX;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                for j in 0..n {
                    a[(i, j)] /= f;
                    a[(j, i)] *= f;
                }
            }
        }
    }
}

/// In-place unitary similarity to upper Hessenberg form.
pub fn hessenberg(a: &mut CMatrix) {
    let n = a.n();
    if n < 3 {
        return;
    }
    let mut v = vec![ZERO; n];
    let mut w = vec![ZERO; n];
    for k in 0..n - 2 {
        let m = n - k - 1;
        let col: Vec<Complex64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let tail = col[1..].iter().map(|z| z.norm_sqr()).sum::<f64>();
        if tail == 0.0 {
            continue;
        }
        let x0 = col[0];
        let phase = if x0 == ZERO { Complex64::new(1.0, 0.0) } else { x0 / x0.norm() };
        let alpha = -phase * norm;
        let vs = &mut v[..m];
        vs.copy_from_slice(&col);
        vs[0] -= alpha;
        let vnorm = vs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in vs.iter_mut() {
            *z /= vnorm;
        }

        // left: rows k+1.., columns k..
        let ws = &mut w[k..n];
        ws.fill(ZERO);
        for (idx, i) in (k + 1..n).enumerate() {
            let cv = vs[idx].conj();
            for (wj, &aij) in ws.iter_mut().zip(&a.row(i)[k..]) {
                *wj += cv * aij;
            }
        }
        for (idx, i) in (k + 1..n).enumerate() {
            let f = vs[idx] * 2.0;
            let row = &mut a.as_mut_slice()[i * n + k..(i + 1) * n];
            for (aij, &wj) in row.iter_mut().zip(ws.iter()) {
                *aij -= f * wj;
            }
        }
        // right: all rows, columns k+1..
        for i in 0..n {
            let row = &mut a.as_mut_slice()[i * n + k + 1..(i + 1) * n];
            let s: Complex64 = row.iter().zip(vs.iter()).map(|(x, y)| x * y).sum::<Complex64>() * 2.0;
            for (aij, vj) in row.iter_mut().zip(vs.iter()) {
                *aij -= s * vj.conj();
            }
        }
        a[(k + 1, k)] = alpha;
        for i in k + 2..n {
            a[(i, k)] = ZERO;
        }
    }
}

/// Rotation `G = [[c, s], [-conj(s), c]]` with `G (a, b)^T = (r, 0)^T`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64, Complex64) {
    if b == ZERO {
        return (1.0, ZERO, a);
    }
    if a == ZERO {
        let nb = b.norm();
        return (0.0, b.conj() / nb, Complex64::new(nb, 0.0));
    }
    let na = a.norm();
    let n = na.hypot(b.norm());
    let phase = a / na;
    (na / n, phase * b.conj() / n, phase * n)
}

/// All eigenvalues of a dense complex matrix (in no particular order).
///
/// Fails with `NoConvergence` after `30 * n` QR sweeps; the error carries the
/// eigenvalues found so far followed by the remaining diagonal.
pub fn eigenvalues_dense(m: &CMatrix) -> Result<Vec<Complex64>> {
    let n = m.n();
    if n > MAX_DIMENSION {
        return Err(Error::InvalidArgument(format!("dimension {n} exceeds {MAX_DIMENSION}")));
    }
    if !m.is_finite() {
        return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = m.clone();
    balance(&mut h);
    hessenberg(&mut h);
    hessenberg_qr(&mut h)
}

fn hessenberg_qr(hm: &mut CMatrix) -> Result<Vec<Complex64>> {
    let n = hm.n();
    let ulp = f64::EPSILON;
    let smlnum = f64::MIN_POSITIVE * (n as f64 / ulp);
    let max_sweeps = 30 * n.max(1);
    let h = hm.as_mut_slice();
    let at = |i: usize, j: usize| i * n + j;

    let mut w = vec![ZERO; n];
    let mut top = n - 1;
    let mut its = 0usize;
    let mut sweeps = 0usize;
    loop {
        if top == 0 {
            w[0] = h[at(0, 0)];
            break;
        }
        let i = top;
        // locate the lowest negligible subdiagonal in 1..=i
        let mut l = 0;
        for k in (1..=i).rev() {
            let sub = cabs1(h[at(k, k - 1)]);
            if sub <= smlnum {
                l = k;
                break;
            }
            let mut tst = cabs1(h[at(k - 1, k - 1)]) + cabs1(h[at(k, k)]);
            if tst == 0.0 {
                if k >= 2 {
                    tst += h[at(k - 1, k - 2)].re.abs();
                }
                if k + 1 < n {
                    tst += h[at(k + 1, k)].re.abs();
                }
            }
            if sub <= ulp * tst {
                let other = cabs1(h[at(k - 1, k)]);
                let ab = sub.max(other);
                let ba = sub.min(other);
                let diff = cabs1(h[at(k - 1, k - 1)] - h[at(k, k)]);
                let aa = cabs1(h[at(k, k)]).max(diff);
                let bb = cabs1(h[at(k, k)]).min(diff);
                let s = aa + ab;
                if ba * (ab / s) <= smlnum.max(ulp * (bb * (aa / s))) {
                    l = k;
                    break;
                }
            }
        }
        if l > 0 {
            h[at(l, l - 1)] = ZERO;
        }
        if l == i {
            w[i] = h[at(i, i)];
            top -= 1;
            its = 0;
            continue;
        }

        if sweeps >= max_sweeps {
            let mut partial: Vec<Complex64> = w[top + 1..].to_vec();
            partial.extend((0..=top).map(|k| h[at(k, k)]));
            return Err(Error::NoConvergence { sweeps, partial });
        }

        let shift = if its == 10 {
            h[at(l + 1, l)].re.abs() * 0.75 + h[at(l, l)]
        } else if its == 20 {
            h[at(i, i - 1)].re.abs() * 0.75 + h[at(i, i)]
        } else {
            let mut t = h[at(i, i)];
            let u = h[at(i - 1, i)].sqrt() * h[at(i, i - 1)].sqrt();
            let su = cabs1(u);
            if su != 0.0 {
                let x = (h[at(i - 1, i - 1)] - t) * 0.5;
                let sx = cabs1(x);
                let s = su.max(sx);
                let mut y = ((x / s) * (x / s) + (u / s) * (u / s)).sqrt() * s;
                if sx > 0.0 {
                    let xs = x / sx;
                    if xs.re * y.re + xs.im * y.im < 0.0 {
                        y = -y;
                    }
                }
                let denom = x + y;
                if denom != ZERO {
                    t -= u * (u / denom);
                }
            }
            t
        };

        // implicit single-shift sweep over the window l..=i
        for k in l..i {
            let (a, b) = if k == l {
                (h[at(l, l)] - shift, h[at(l + 1, l)])
            } else {
                (h[at(k, k - 1)], h[at(k + 1, k - 1)])
            };
            let (c, s, r) = givens(a, b);
            if k > l {
                h[at(k, k - 1)] = r;
                h[at(k + 1, k - 1)] = ZERO;
            }
            let sc = s.conj();
            for j in k..=i {
                let x = h[at(k, j)];
                let y = h[at(k + 1, j)];
                h[at(k, j)] = x * c + s * y;
                h[at(k + 1, j)] = y * c - sc * x;
            }
            let last = (k + 2).min(i);
            for row in l..=last {
                let x = h[at(row, k)];
                let y = h[at(row, k + 1)];
                h[at(row, k)] = x * c + y * sc;
                h[at(row, k + 1)] = y * c - x * s;
            }
        }
        its += 1;
        sweeps += 1;
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Multiset match: every expected value pairs with a distinct computed one.
    fn assert_multiset(got: &[Complex64], want: &[Complex64], tol: f64) {
        assert_eq!(got.len(), want.len());
        let mut used = vec![false; got.len()];
        for w in want {
            let (idx, d) = got
                .iter()
                .enumerate()
                .filter(|(i, _)| !used[*i])
                .map(|(i, g)| (i, (g - w).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            assert!(d <= tol * (1.0 + w.norm()), "{w} missing (closest off by {d})");
            used[idx] = true;
        }
    }

    fn random_matrix(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
        CMatrix::from_fn(n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    /// Q from Gram-Schmidt on a random complex matrix.
    fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
        let a = random_matrix(n, rng);
        let mut cols: Vec<Vec<Complex64>> = Vec::new();
        for j in 0..n {
            let mut v: Vec<Complex64> = (0..n).map(|i| a[(i, j)]).collect();
            for q in &cols {
                let dot: Complex64 = q.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= dot * qi;
                }
            }
            let nv = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            cols.push(v.into_iter().map(|z| z / nv).collect());
        }
        CMatrix::from_fn(n, |i, j| cols[j][i])
    }

    #[test]
    fn diagonal_matrix() {
        let d = [c(3.0, 0.0), c(-1.0, 2.0), c(0.0, 0.0), c(1e-3, -5.0)];
        let got = eigenvalues_dense(&CMatrix::from_diagonal(&d)).unwrap();
        assert_multiset(&got, &d, 1e-15);
    }

    #[test]
    fn davies_hamilton_map() {
        let alpha = 0.8;
        let mut m = CMatrix::zeros(2);
        m[(0, 1)] = c(1.0, 0.0);
        m[(1, 0)] = -Complex64::from_polar(1.0, alpha);
        let mu = Complex64::i() * Complex64::from_polar(1.0, alpha / 2.0);
        assert_multiset(&eigenvalues_dense(&m).unwrap(), &[mu, -mu], 1e-14);
    }

    #[test]
    fn unitary_similarity_of_known_diagonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1, 2, 3, 10, 60] {
            let d: Vec<Complex64> = (0..n).map(|_| c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0))).collect();
            let q = random_unitary(n, &mut rng);
            let m = q.matmul(&CMatrix::from_diagonal(&d)).matmul(&q.adjoint());
            assert_multiset(&eigenvalues_dense(&m).unwrap(), &d, 1e-10);
        }
    }

    #[test]
    fn trace_and_backward_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 120;
        let m = random_matrix(n, &mut rng);
        let ev = eigenvalues_dense(&m).unwrap();
        let sum: Complex64 = ev.iter().sum();
        let norm = m.frobenius_norm();
        assert!((sum - m.trace()).norm() <= 1e-9 * norm * n as f64);
    }

    #[test]
    fn similarity_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 40;
        let m = random_matrix(n, &mut rng);
        // T = I + small random perturbation keeps cond(T) well below 100
        let t = CMatrix::identity(n).add(&random_matrix(n, &mut rng).scale(c(0.3 / n as f64, 0.0)));
        let tinv = invert(&t);
        let sim = t.matmul(&m).matmul(&tinv);
        let a = eigenvalues_dense(&m).unwrap();
        let b = eigenvalues_dense(&sim).unwrap();
        assert_multiset(&b, &a, 1e-8);
    }

    #[test]
    fn nilpotent_and_zero() {
        let ev = eigenvalues_dense(&CMatrix::zeros(5)).unwrap();
        assert!(ev.iter().all(|z| *z == ZERO));
        let mut j = CMatrix::zeros(3);
        j[(0, 1)] = c(1.0, 0.0);
        j[(1, 2)] = c(1.0, 0.0);
        let ev = eigenvalues_dense(&j).unwrap();
        assert!(ev.iter().all(|z| z.norm() < 1e-5));
    }

    #[test]
    fn companion_matrix_roots() {
        // roots 1..=8 of prod (z - k)
        let roots: Vec<Complex64> = (1..=8).map(|k| c(k as f64, 0.0)).collect();
        let mut coeffs = vec![c(1.0, 0.0)];
        for r in &roots {
            let mut next = vec![ZERO; coeffs.len() + 1];
            for (i, a) in coeffs.iter().enumerate() {
                next[i] += a;
                next[i + 1] -= a * r;
            }
            coeffs = next;
        }
        let n = roots.len();
        let mut m = CMatrix::zeros(n);
        for j in 0..n {
            m[(0, j)] = -coeffs[j + 1];
        }
        for i in 1..n {
            m[(i, i - 1)] = c(1.0, 0.0);
        }
        assert_multiset(&eigenvalues_dense(&m).unwrap(), &roots, 1e-7);
    }

    #[test]
    fn rejects_non_finite() {
        let mut m = CMatrix::identity(3);
        m[(1, 2)] = c(f64::NAN, 0.0);
        assert!(eigenvalues_dense(&m).is_err());
    }

    fn invert(a: &CMatrix) -> CMatrix {
        let n = a.n();
        let mut m = a.clone();
        let mut inv = CMatrix::identity(n);
        for col in 0..n {
            let p = (col..n).max_by(|&x, &y| m[(x, col)].norm().total_cmp(&m[(y, col)].norm())).unwrap();
            for j in 0..n {
                let (t1, t2) = (m[(col, j)], inv[(col, j)]);
                m[(col, j)] = m[(p, j)];
                inv[(col, j)] = inv[(p, j)];
                m[(p, j)] = t1;
                inv[(p, j)] = t2;
            }
            let d = m[(col, col)];
            for j in 0..n {
                m[(col, j)] /= d;
                inv[(col, j)] /= d;
            }
            for i in 0..n {
                if i != col {
                    let f = m[(i, col)];
                    for j in 0..n {
                        let (mc, ic) = (m[(col, j)], inv[(col, j)]);
                        m[(i, j)] -= f * mc;
                        inv[(i, j)] -= f * ic;
                    }
                }
            }
        }
        inv
    }
}
