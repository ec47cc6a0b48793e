//! Differential forms at a point.
//!
//! A k-form stores the values `ω(∂_{i1},…,∂_{ik})` on increasing tuples. These
//! values do not depend on the wedge convention; the convention only enters
//! [`FormJet::wedge`]. The exterior derivative is the coordinate formula
//! `(dω)_{i0…ik} = Σ_j (−1)^j ∂_{ij} ω_{…îj…}` and the interior product is
//! plain contraction in the first slot, in both conventions.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::geometry::{apply, bracket};
use crate::jet::Jet;
use crate::linalg::{self, JetVec};

/// Normalization of the wedge product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Convention {
    /// `(dx1 ∧ dx2)(∂1, ∂2) = 1`.
    #[default]
    UnitShuffle,
    /// `(dx1 ∧ dx2)(∂1, ∂2) = 1/2`.
    FactorialAlternation,
}

impl Convention {
    /// Factor multiplying the shuffle sum for a `k`-form wedged with an `l`-form.
    pub fn wedge_factor(self, k: usize, l: usize) -> f64 {
        match self {
            Convention::UnitShuffle => 1.0,
            Convention::FactorialAlternation => factorial(k) * factorial(l) / factorial(k + l),
        }
    }

    /// Value of `θ¹ ∧ … ∧ θᵐ` on its dual frame.
    pub fn top_constant(self, m: usize) -> f64 {
        match self {
            Convention::UnitShuffle => 1.0,
            Convention::FactorialAlternation => 1.0 / factorial(m),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Convention::UnitShuffle => "unit-shuffle",
            Convention::FactorialAlternation => "factorial-alternation",
        }
    }
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut r = 1usize;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Increasing k-tuples of `0..n` in lexicographic order.
pub fn tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(binom(n, k));
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - k + i {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Lexicographic rank of an increasing tuple.
fn rank_of(t: &[usize], n: usize) -> usize {
    let k = t.len();
    let mut r = 0;
    let mut prev = 0usize;
    for (i, &c) in t.iter().enumerate() {
        for j in prev..c {
            r += binom(n - 1 - j, k - 1 - i);
        }
        prev = c + 1;
    }
    r
}

#[derive(Debug, Clone, PartialEq)]
pub struct FormJet {
    n: usize,
    k: usize,
    comps: Vec<Jet>,
}

impl FormJet {
    pub fn zero(n: usize, k: usize) -> Result<FormJet> {
        if k > n {
            return Err(Error::DegreeOverflow(k, n));
        }
        Ok(FormJet { n, k, comps: vec![Jet::constant(0.0); binom(n, k)] })
    }

    pub fn scalar(f: Jet, n: usize) -> FormJet {
        FormJet { n, k: 0, comps: vec![f] }
    }

    /// One-form with components `w_i = ω(∂_i)`.
    pub fn one_form(w: &[Jet]) -> FormJet {
        FormJet { n: w.len(), k: 1, comps: w.to_vec() }
    }

    /// Builds a k-form from its values on coordinate tuples.
    pub fn from_fn(n: usize, k: usize, mut f: impl FnMut(&[usize]) -> Jet) -> Result<FormJet> {
        let mut out = FormJet::zero(n, k)?;
        for (slot, t) in out.comps.iter_mut().zip(tuples(n, k)) {
            *slot = f(&t);
        }
        Ok(out)
    }

    pub fn degree(&self) -> usize {
        self.k
    }
    pub fn dim(&self) -> usize {
        self.n
    }
    pub fn components(&self) -> &[Jet] {
        &self.comps
    }

    /// `ω(∂_t)` for an increasing tuple.
    pub fn get(&self, t: &[usize]) -> Jet {
        self.comps[rank_of(t, self.n)]
    }

    /// `ω(∂_t)` for an arbitrary tuple, with sign and zero for repeats.
    pub fn get_any(&self, t: &[usize]) -> Jet {
        let mut s: Vec<usize> = t.to_vec();
        let mut sign = 1.0;
        for i in 0..s.len() {
            for j in 0..s.len() - 1 - i {
                if s[j] > s[j + 1] {
                    s.swap(j, j + 1);
                    sign = -sign;
                } else if s[j] == s[j + 1] {
                    return Jet::constant(0.0);
                }
            }
        }
        if s.windows(2).any(|w| w[0] == w[1]) {
            return Jet::constant(0.0);
        }
        self.get(&s) * sign
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().fold(0.0f64, |m, c| m.max(c.value().abs()))
    }

    pub fn add(&self, other: &FormJet) -> FormJet {
        assert_eq!((self.n, self.k), (other.n, other.k));
        FormJet { n: self.n, k: self.k, comps: self.comps.iter().zip(&other.comps).map(|(a, b)| *a + *b).collect() }
    }

    pub fn scale(&self, c: Jet) -> FormJet {
        FormJet { n: self.n, k: self.k, comps: self.comps.iter().map(|a| c * *a).collect() }
    }

    /// `Σ_I ω_I det(v[I])` on k vectors.
    pub fn eval(&self, vs: &[JetVec]) -> Jet {
        assert_eq!(vs.len(), self.k);
        if self.k == 0 {
            return self.comps[0];
        }
        let mut acc = Jet::constant(0.0);
        for (c, t) in self.comps.iter().zip(tuples(self.n, self.k)) {
            if c.max_abs() == 0.0 {
                continue;
            }
            let m: Vec<Vec<Jet>> = t.iter().map(|&i| vs.iter().map(|v| v[i]).collect()).collect();
            acc += *c * linalg::det(&m);
        }
        acc
    }

    pub fn wedge(&self, other: &FormJet, conv: Convention) -> Result<FormJet> {
        let (n, k, l) = (self.n, self.k, other.k);
        if k + l > n {
            return Err(Error::DegreeOverflow(k + l, n));
        }
        let factor = conv.wedge_factor(k, l);
        FormJet::from_fn(n, k + l, |kt| {
            let mut acc = Jet::constant(0.0);
            for sel in tuples(k + l, k) {
                let i: Vec<usize> = sel.iter().map(|&s| kt[s]).collect();
                let j: Vec<usize> = (0..k + l).filter(|s| !sel.contains(s)).map(|s| kt[s]).collect();
                let inversions: usize = i.iter().map(|a| j.iter().filter(|b| a > b).count()).sum();
                let sign = if inversions.is_multiple_of(2) { 1.0 } else { -1.0 };
                acc += self.get(&i) * other.get(&j) * sign;
            }
            acc * factor
        })
    }

    pub fn d(&self) -> Result<FormJet> {
        if self.k + 1 > self.n {
            return Err(Error::DegreeOverflow(self.k + 1, self.n));
        }
        if self.comps.iter().any(|c| c.order() == 0) {
            return Err(Error::DerivativeOrder);
        }
        FormJet::from_fn(self.n, self.k + 1, |t| {
            let mut acc = Jet::constant(0.0);
            for j in 0..t.len() {
                let rest: Vec<usize> = t.iter().enumerate().filter(|(a, _)| *a != j).map(|(_, &b)| b).collect();
                let term = self.get(&rest).partial(t[j]);
                if j % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            acc
        })
    }

    pub fn interior(&self, v: &[Jet]) -> Result<FormJet> {
        if self.k == 0 {
            return Err(Error::DegreeUnderflow);
        }
        FormJet::from_fn(self.n, self.k - 1, |jt| {
            let mut acc = Jet::constant(0.0);
            for (i, vi) in v.iter().enumerate() {
                if jt.contains(&i) {
                    continue;
                }
                let pos = jt.iter().filter(|&&a| a < i).count();
                let mut t: Vec<usize> = jt.to_vec();
                t.insert(pos, i);
                let term = *vi * self.get(&t);
                if pos % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            acc
        })
    }

    /// Cartan's formula `i_X dω + d i_X ω`.
    pub fn lie(&self, x: &[Jet]) -> Result<FormJet> {
        if self.k == 0 {
            return self.d()?.interior(x);
        }
        let b = self.interior(x)?.d()?;
        if self.k == self.n {
            // dω = 0 for a top form
            return Ok(b);
        }
        Ok(self.d()?.interior(x)?.add(&b))
    }
}

/// `(L_X ω)(Y_1..Y_k) = X(ω(Y)) − Σ_j ω(…,[X,Y_j],…)` on vector fields.
pub fn lie_by_brackets(omega: &FormJet, x: &[Jet], ys: &[JetVec]) -> Jet {
    let mut acc = apply(x, &omega.eval(ys));
    for j in 0..ys.len() {
        let mut args = ys.to_vec();
        args[j] = bracket(x, &ys[j]);
        acc -= omega.eval(&args);
    }
    acc
}

/// Wedge of several one-forms, left to right.
pub fn wedge_all(ones: &[FormJet], n: usize, conv: Convention) -> Result<FormJet> {
    let mut acc = FormJet::scalar(Jet::constant(1.0), n);
    for w in ones {
        acc = acc.wedge(w, conv)?;
    }
    Ok(acc)
}

/// A k-form with one expression per increasing coordinate tuple, in
/// lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct FormField {
    pub n: usize,
    pub k: usize,
    pub comps: Vec<Expr>,
}

impl FormField {
    pub fn new(n: usize, k: usize, comps: Vec<Expr>) -> Result<FormField> {
        if k > n {
            return Err(Error::DegreeOverflow(k, n));
        }
        if comps.len() != binom(n, k) {
            return Err(Error::Invalid(alloc::format!("a {k}-form on {n} coordinates has {} components", binom(n, k))));
        }
        Ok(FormField { n, k, comps })
    }

    pub fn eval_with(&self, x: &[Jet]) -> Result<FormJet> {
        let comps = self.comps.iter().map(|e| e.eval_with(x)).collect::<Result<Vec<_>, _>>()?;
        Ok(FormJet { n: self.n, k: self.k, comps })
    }
}

/// Largest `|i_X ω|` and `|i_X dω|` component over a frame.
pub fn basic_residual(omega: &FormJet, frame: &[JetVec]) -> Result<f64> {
    let dw = if omega.degree() < omega.dim() { Some(omega.d()?) } else { None };
    let mut worst = 0.0f64;
    for x in frame {
        if omega.degree() > 0 {
            worst = worst.max(omega.interior(x)?.max_abs());
        }
        if let Some(dw) = &dw {
            worst = worst.max(dw.interior(x)?.max_abs());
        }
    }
    Ok(worst)
}

/// Largest residual of `j`-fold contractions by increasing frame tuples.
pub fn contraction_residual(omega: &FormJet, frame: &[JetVec], j: usize) -> f64 {
    if j > omega.degree() {
        return 0.0;
    }
    let mut worst = 0.0f64;
    for sel in tuples(frame.len(), j) {
        let mut w = omega.clone();
        for &s in sel.iter().rev() {
            w = w.interior(&frame[s]).expect("degree checked");
        }
        worst = worst.max(w.max_abs());
    }
    worst
}

/// Largest `r` with all `(k − r + 1)`-fold tangent contractions below `tol`.
pub fn filtration_degree(omega: &FormJet, frame: &[JetVec], tol: f64) -> usize {
    let k = omega.degree();
    for j in 0..=k {
        if contraction_residual(omega, frame, j) <= tol {
            return k + 1 - j;
        }
    }
    0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dx(i: usize, n: usize) -> FormJet {
        FormJet::one_form(&linalg::constant_vec(&(0..n).map(|k| if k == i { 1.0 } else { 0.0 }).collect::<Vec<_>>()))
    }

    fn e(i: usize, n: usize) -> JetVec {
        linalg::constant_vec(&(0..n).map(|k| if k == i { 1.0 } else { 0.0 }).collect::<Vec<_>>())
    }

    #[test]
    fn tuple_ranks() {
        for n in 1..=8 {
            for k in 0..=n {
                for (r, t) in tuples(n, k).iter().enumerate() {
                    assert_eq!(rank_of(t, n), r);
                }
            }
        }
    }

    #[test]
    fn convention_anchor() {
        let w = dx(0, 2).wedge(&dx(1, 2), Convention::UnitShuffle).unwrap();
        assert_eq!(w.eval(&[e(0, 2), e(1, 2)]).value(), 1.0);
        let w = dx(0, 2).wedge(&dx(1, 2), Convention::FactorialAlternation).unwrap();
        assert_eq!(w.eval(&[e(0, 2), e(1, 2)]).value(), 0.5);
    }

    #[test]
    fn d_of_x1_dx2() {
        let x = Jet::seed(&[0.3, 0.1], 2);
        let w = FormJet::one_form(&[Jet::constant(0.0), x[0]]);
        let dw = w.d().unwrap();
        assert_eq!(dw.get(&[0, 1]).value(), 1.0);
    }

    #[test]
    fn interior_of_area() {
        let w = dx(0, 2).wedge(&dx(1, 2), Convention::UnitShuffle).unwrap();
        let i = w.interior(&e(0, 2)).unwrap();
        assert_eq!(i, dx(1, 2));
        assert!(matches!(FormJet::scalar(Jet::constant(1.0), 2).interior(&e(0, 2)), Err(Error::DegreeUnderflow)));
        assert!(matches!(w.wedge(&dx(0, 2), Convention::UnitShuffle), Err(Error::DegreeOverflow(3, 2))));
    }

    #[test]
    fn filtration_of_volume() {
        let vol = wedge_all(&[dx(0, 3), dx(1, 3), dx(2, 3)], 3, Convention::UnitShuffle).unwrap();
        // tangent frame {∂1}: one contraction survives, two do not
        assert_eq!(filtration_degree(&vol, &[e(0, 3)], 1e-12), 2);
        let z = FormJet::zero(3, 2).unwrap();
        assert_eq!(filtration_degree(&z, &[e(0, 3)], 1e-12), 3);
    }
}
