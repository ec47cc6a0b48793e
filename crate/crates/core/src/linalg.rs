//! Small dense linear algebra on jets and plain values.

use alloc::vec;
use alloc::vec::Vec;

use crate::jet::Jet;

pub type JetVec = Vec<Jet>;
pub type JetMat = Vec<Vec<Jet>>;

/// Relative singularity test: `|det| < 1e-12 * (max |entry|)^n`.
pub fn is_singular(det: f64, max_entry: f64, n: usize) -> bool {
    let scale = libm::pow(max_entry, n as f64);
    !(det.abs() >= 1e-12 * scale) || max_entry == 0.0
}

pub fn max_abs_value(a: &[Vec<Jet>]) -> f64 {
    a.iter().flatten().fold(0.0f64, |m, j| m.max(j.value().abs()))
}

/// Gaussian elimination with partial pivoting on values.
///
/// Returns `(det, X)` with `A X = B`, or `None` when `A` is singular by
/// [`is_singular`].
pub fn solve(a: &[Vec<Jet>], b: &[Vec<Jet>]) -> Option<(Jet, JetMat)> {
    let n = a.len();
    let k = b.first().map_or(0, |r| r.len());
    let scale = max_abs_value(a);
    let mut m: JetMat = a.to_vec();
    let mut rhs: JetMat = b.to_vec();
    let mut det = Jet::constant(1.0);
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| m[i][c].value().abs().total_cmp(&m[j][c].value().abs()))?;
        if m[piv][c].value() == 0.0 {
            return None;
        }
        if piv != c {
            m.swap(piv, c);
            rhs.swap(piv, c);
            det = -det;
        }
        det = det * m[c][c];
        let inv = m[c][c].recip();
        for r in c + 1..n {
            let f = m[r][c] * inv;
            if f.max_abs() == 0.0 {
                continue;
            }
            for cc in c..n {
                let t = m[c][cc];
                m[r][cc] -= f * t;
            }
            for cc in 0..k {
                let t = rhs[c][cc];
                rhs[r][cc] -= f * t;
            }
        }
    }
    if is_singular(det.value(), scale, n) {
        return None;
    }
    let mut x = vec![vec![Jet::constant(0.0); k]; n];
    for r in (0..n).rev() {
        let inv = m[r][r].recip();
        for cc in 0..k {
            let mut acc = rhs[r][cc];
            for j in r + 1..n {
                acc -= m[r][j] * x[j][cc];
            }
            x[r][cc] = acc * inv;
        }
    }
    Some((det, x))
}

pub fn identity(n: usize) -> JetMat {
    (0..n)
        .map(|i| (0..n).map(|j| Jet::constant(if i == j { 1.0 } else { 0.0 })).collect())
        .collect()
}

pub fn inverse(a: &[Vec<Jet>]) -> Option<(Jet, JetMat)> {
    solve(a, &identity(a.len()))
}

/// Determinant without a singularity test.
pub fn det(a: &[Vec<Jet>]) -> Jet {
    let n = a.len();
    if n == 0 {
        return Jet::constant(1.0);
    }
    let mut m: JetMat = a.to_vec();
    let mut det = Jet::constant(1.0);
    for c in 0..n {
        let piv = (c..n)
            .max_by(|&i, &j| m[i][c].value().abs().total_cmp(&m[j][c].value().abs()))
            .unwrap();
        if m[piv][c].value() == 0.0 {
            return Jet::constant(0.0);
        }
        if piv != c {
            m.swap(piv, c);
            det = -det;
        }
        det = det * m[c][c];
        let inv = m[c][c].recip();
        for r in c + 1..n {
            let f = m[r][c] * inv;
            for cc in c..n {
                let t = m[c][cc];
                m[r][cc] -= f * t;
            }
        }
    }
    det
}

pub fn transpose(a: &[Vec<Jet>]) -> JetMat {
    if a.is_empty() {
        return Vec::new();
    }
    (0..a[0].len()).map(|j| a.iter().map(|row| row[j]).collect()).collect()
}

pub fn matmul(a: &[Vec<Jet>], b: &[Vec<Jet>]) -> JetMat {
    let k = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| (0..k).map(|j| row.iter().zip(b).map(|(x, br)| *x * br[j]).sum()).collect())
        .collect()
}

pub fn values(a: &[Vec<Jet>]) -> Vec<Vec<f64>> {
    a.iter().map(|r| r.iter().map(|j| j.value()).collect()).collect()
}

/// `Σ c_i v_i` for jet coefficients and jet vectors of length `n`.
pub fn combine(coeffs: &[Jet], vs: &[JetVec], n: usize) -> JetVec {
    let mut out = vec![Jet::constant(0.0); n];
    for (c, v) in coeffs.iter().zip(vs) {
        for k in 0..n {
            out[k] += *c * v[k];
        }
    }
    out
}

pub fn scale(c: Jet, v: &[Jet]) -> JetVec {
    v.iter().map(|x| c * *x).collect()
}

pub fn add(a: &[Jet], b: &[Jet]) -> JetVec {
    a.iter().zip(b).map(|(x, y)| *x + *y).collect()
}

pub fn sub(a: &[Jet], b: &[Jet]) -> JetVec {
    a.iter().zip(b).map(|(x, y)| *x - *y).collect()
}

pub fn constant_vec(v: &[f64]) -> JetVec {
    v.iter().map(|&x| Jet::constant(x)).collect()
}

pub fn vec_values(v: &[Jet]) -> Vec<f64> {
    v.iter().map(|j| j.value()).collect()
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Eigenvalues and eigenvectors (columns) of a symmetric matrix by cyclic
/// Jacobi rotations.
pub fn sym_eigen(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| m[i][j] * m[i][j]).sum();
        let diag: f64 = (0..n).map(|i| m[i][i] * m[i][i]).sum();
        if off <= 1e-30 * diag.max(1e-300) || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q] == 0.0 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[k][p], v[k][q]);
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| m[i][i]).collect(), v)
}

/// Signature counts `(negative, zero, positive)` with the relative rank
/// threshold `rel * max |eigenvalue|`.
pub fn inertia(a: &[Vec<f64>], rel: f64) -> (usize, usize, usize) {
    let (ev, _) = sym_eigen(a);
    let top = norm_inf(&ev);
    let mut out = (0, 0, 0);
    for e in ev {
        if e.abs() <= rel * top || top == 0.0 {
            out.1 += 1;
        } else if e < 0.0 {
            out.0 += 1;
        } else {
            out.2 += 1;
        }
    }
    out
}

/// Complete-pivoting elimination that picks `rank` pivot rows and columns.
pub fn pivot_sets(a: &[Vec<f64>], rank: usize) -> (Vec<usize>, Vec<usize>) {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut m = a.to_vec();
    let mut rused = vec![false; rows];
    let mut cused = vec![false; cols];
    let (mut rs, mut cs) = (Vec::new(), Vec::new());
    for _ in 0..rank {
        let mut best = (usize::MAX, usize::MAX, -1.0f64);
        for (i, row) in m.iter().enumerate() {
            if rused[i] {
                continue;
            }
            for (j, x) in row.iter().enumerate() {
                if !cused[j] && x.abs() > best.2 {
                    best = (i, j, x.abs());
                }
            }
        }
        let (pi, pj, _) = best;
        if pi == usize::MAX {
            break;
        }
        rused[pi] = true;
        cused[pj] = true;
        rs.push(pi);
        cs.push(pj);
        let pv = m[pi][pj];
        if pv == 0.0 {
            continue;
        }
        for i in 0..rows {
            if rused[i] {
                continue;
            }
            let f = m[i][pj] / pv;
            for j in 0..cols {
                m[i][j] -= f * m[pi][j];
            }
        }
    }
    rs.sort_unstable();
    cs.sort_unstable();
    (rs, cs)
}

/// Numerical rank of an arbitrary matrix through the eigenvalues of `A Aᵀ`.
pub fn rank(a: &[Vec<f64>], rel: f64) -> usize {
    let r = a.len();
    let gram: Vec<Vec<f64>> = (0..r)
        .map(|i| (0..r).map(|j| a[i].iter().zip(&a[j]).map(|(x, y)| x * y).sum()).collect())
        .collect();
    let (ev, _) = sym_eigen(&gram);
    let top = norm_inf(&ev);
    // singular values are square roots of these eigenvalues
    ev.iter().filter(|e| libm::sqrt(e.abs()) > rel * libm::sqrt(top) && top > 0.0).count()
}

/// Euclidean residual of the worst vector of `a` after projection onto
/// `span(b)`, relative to its norm. Symmetric use gives a span comparison.
pub fn span_residual(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    // orthonormal basis of span(b) by modified Gram-Schmidt
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in b {
        let mut w = v.clone();
        for _ in 0..2 {
            for e in &basis {
                let d: f64 = w.iter().zip(e).map(|(x, y)| x * y).sum();
                for (wi, ei) in w.iter_mut().zip(e) {
                    *wi -= d * ei;
                }
            }
        }
        let nn = libm::sqrt(w.iter().map(|x| x * x).sum::<f64>());
        let vn = libm::sqrt(v.iter().map(|x| x * x).sum::<f64>());
        if nn > 1e-12 * vn.max(1e-300) {
            basis.push(w.iter().map(|x| x / nn).collect());
        }
    }
    let mut worst = 0.0f64;
    for v in a {
        let mut w = v.clone();
        for e in &basis {
            let d: f64 = w.iter().zip(e).map(|(x, y)| x * y).sum();
            for (wi, ei) in w.iter_mut().zip(e) {
                *wi -= d * ei;
            }
        }
        let vn = libm::sqrt(v.iter().map(|x| x * x).sum::<f64>());
        let wn = libm::sqrt(w.iter().map(|x| x * x).sum::<f64>());
        worst = worst.max(if vn > 0.0 { wn / vn } else { 0.0 });
    }
    worst
}
