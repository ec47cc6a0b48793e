//! Second-order truncated Taylor values.

use core::fmt;
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Largest chart dimension a [`Jet`] can carry.
pub const MAX_DIM: usize = 8;
const TRI: usize = MAX_DIM * (MAX_DIM + 1) / 2;

#[inline]
fn tri(i: usize, j: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    b * (b + 1) / 2 + a
}

/// Value, gradient and Hessian of a scalar at a point.
///
/// `order` counts how many derivative levels are valid. Constants are exact
/// and carry order 2. Arithmetic keeps the smaller order of its operands and
/// [`Jet::partial`] lowers it by one. Invalid levels are stored as zero.
#[derive(Clone, Copy, PartialEq)]
pub struct Jet {
    value: f64,
    grad: [f64; MAX_DIM],
    hess: [f64; TRI],
    dim: u8,
    order: u8,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.dim as usize;
        write!(f, "Jet({}, grad={:?}, order={})", self.value, &self.grad[..n], self.order)
    }
}

impl Default for Jet {
    fn default() -> Self {
        Jet::constant(0.0)
    }
}

impl From<f64> for Jet {
    fn from(v: f64) -> Self {
        Jet::constant(v)
    }
}

impl Jet {
    /// An exact constant.
    pub const fn constant(value: f64) -> Jet {
        Jet { value, grad: [0.0; MAX_DIM], hess: [0.0; TRI], dim: 0, order: 2 }
    }

    /// The coordinate function `x_{index+1}` seeded at `value`.
    ///
    /// # Panics
    /// If `index >= dim`, `dim > MAX_DIM` or `order > 2`.
    pub fn variable(value: f64, index: usize, dim: usize, order: u8) -> Jet {
        assert!(index < dim && dim <= MAX_DIM && order <= 2);
        let mut j = Jet::constant(value);
        j.dim = dim as u8;
        j.order = order;
        if order >= 1 {
            j.grad[index] = 1.0;
        }
        j
    }

    /// Seeded coordinate jets for a whole point.
    pub fn seed(point: &[f64], order: u8) -> alloc::vec::Vec<Jet> {
        let n = point.len();
        point.iter().enumerate().map(|(i, &v)| Jet::variable(v, i, n, order)).collect()
    }

    /// Builds a jet from explicit parts. `hess(i, j)` is queried for `i <= j`.
    pub fn from_parts(value: f64, grad: &[f64], hess: impl Fn(usize, usize) -> f64, order: u8) -> Jet {
        let n = grad.len();
        assert!(n <= MAX_DIM && order <= 2);
        let mut j = Jet::constant(value);
        j.dim = n as u8;
        j.order = order;
        if order >= 1 {
            j.grad[..n].copy_from_slice(grad);
        }
        if order >= 2 {
            for b in 0..n {
                for a in 0..=b {
                    j.hess[tri(a, b)] = hess(a, b);
                }
            }
        }
        j
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.value
    }
    #[inline]
    pub fn grad(&self, i: usize) -> f64 {
        self.grad[i]
    }
    #[inline]
    pub fn hess(&self, i: usize, j: usize) -> f64 {
        self.hess[tri(i, j)]
    }
    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }
    #[inline]
    pub fn order(&self) -> u8 {
        self.order
    }

    /// Drops derivative levels above `order`.
    pub fn truncate(mut self, order: u8) -> Jet {
        if order < self.order {
            self.order = order;
            if order < 2 {
                self.hess = [0.0; TRI];
            }
            if order < 1 {
                self.grad = [0.0; MAX_DIM];
            }
        }
        self
    }

    /// The jet of `∂_i` of this function, one order lower.
    ///
    /// # Panics
    /// On an order-0 jet.
    pub fn partial(&self, i: usize) -> Jet {
        assert!(self.order > 0, "partial derivative of an order-0 jet");
        let mut out = Jet::constant(self.grad[i]);
        out.dim = self.dim;
        out.order = self.order - 1;
        if out.order >= 1 {
            for k in 0..self.dim as usize {
                out.grad[k] = self.hess[tri(i, k)];
            }
        }
        out
    }

    /// Re-indexes derivatives of a jet on a factor chart into a product
    /// chart of dimension `dim`, with the factor starting at `offset`.
    pub fn shifted(&self, offset: usize, dim: usize) -> Jet {
        let n = self.dim as usize;
        assert!(offset + n <= dim && dim <= MAX_DIM);
        let mut out = Jet::constant(self.value);
        out.dim = dim as u8;
        out.order = self.order;
        for i in 0..n {
            out.grad[offset + i] = self.grad[i];
            for j in i..n {
                out.hess[tri(offset + i, offset + j)] = self.hess[tri(i, j)];
            }
        }
        out
    }

    /// Largest absolute value among the stored levels.
    pub fn max_abs(&self) -> f64 {
        let mut m = self.value.abs();
        for g in &self.grad {
            m = m.max(g.abs());
        }
        for h in &self.hess {
            m = m.max(h.abs());
        }
        m
    }

    /// `φ(u)` from `φ(u)`, `φ'(u)` and `φ''(u)`.
    pub fn chain(&self, f0: f64, f1: f64, f2: f64) -> Jet {
        let mut out = *self;
        out.value = f0;
        let n = self.dim as usize;
        if self.order >= 2 {
            for b in 0..n {
                for a in 0..=b {
                    let t = tri(a, b);
                    out.hess[t] = f2 * self.grad[a] * self.grad[b] + f1 * self.hess[t];
                }
            }
        }
        if self.order >= 1 {
            for k in 0..n {
                out.grad[k] = f1 * self.grad[k];
            }
        }
        out
    }

    pub fn recip(&self) -> Jet {
        let u = self.value;
        self.chain(1.0 / u, -1.0 / (u * u), 2.0 / (u * u * u))
    }

    pub fn sqrt(&self) -> Jet {
        let s = libm::sqrt(self.value);
        self.chain(s, 0.5 / s, -0.25 / (s * self.value))
    }

    pub fn exp(&self) -> Jet {
        let e = libm::exp(self.value);
        self.chain(e, e, e)
    }

    pub fn ln(&self) -> Jet {
        let u = self.value;
        self.chain(libm::log(u), 1.0 / u, -1.0 / (u * u))
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = (libm::sin(self.value), libm::cos(self.value));
        self.chain(s, c, -s)
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = (libm::sin(self.value), libm::cos(self.value));
        self.chain(c, -s, -c)
    }

    pub fn powi(&self, k: i32) -> Jet {
        let u = self.value;
        let kf = k as f64;
        match k {
            0 => Jet::constant(1.0).truncate(self.order),
            1 => *self,
            _ => self.chain(
                powi(u, k),
                kf * powi(u, k - 1),
                kf * (kf - 1.0) * powi(u, k - 2),
            ),
        }
    }

    /// Real power; the caller guarantees a positive base.
    pub fn powf(&self, a: f64) -> Jet {
        let u = self.value;
        self.chain(libm::pow(u, a), a * libm::pow(u, a - 1.0), a * (a - 1.0) * libm::pow(u, a - 2.0))
    }

    /// `|u|`, valid away from zero.
    pub fn abs(&self) -> Jet {
        if self.value < 0.0 {
            -*self
        } else {
            *self
        }
    }
}

fn powi(u: f64, k: i32) -> f64 {
    if k >= 0 {
        let mut acc = 1.0;
        for _ in 0..k {
            acc *= u;
        }
        acc
    } else {
        1.0 / powi(u, -k)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        let mut out = self;
        out.value += rhs.value;
        for k in 0..MAX_DIM {
            out.grad[k] += rhs.grad[k];
        }
        for t in 0..TRI {
            out.hess[t] += rhs.hess[t];
        }
        out.dim = self.dim.max(rhs.dim);
        out.truncate(self.order.min(rhs.order))
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        self + (-rhs)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(mut self) -> Jet {
        self.value = -self.value;
        for g in self.grad.iter_mut() {
            *g = -*g;
        }
        for h in self.hess.iter_mut() {
            *h = -*h;
        }
        self
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let order = self.order.min(rhs.order);
        let n = self.dim.max(rhs.dim) as usize;
        let (a, b) = (self.value, rhs.value);
        let mut out = Jet::constant(a * b);
        out.dim = n as u8;
        out.order = order;
        if order >= 1 {
            for k in 0..n {
                out.grad[k] = a * rhs.grad[k] + b * self.grad[k];
            }
        }
        if order >= 2 {
            for j in 0..n {
                for i in 0..=j {
                    let t = tri(i, j);
                    out.hess[t] = a * rhs.hess[t]
                        + b * self.hess[t]
                        + self.grad[i] * rhs.grad[j]
                        + self.grad[j] * rhs.grad[i];
                }
            }
        }
        out
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        self * rhs.recip()
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.value += rhs;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: f64) -> Jet {
        self.value -= rhs;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(mut self, rhs: f64) -> Jet {
        self.value *= rhs;
        for g in self.grad.iter_mut() {
            *g *= rhs;
        }
        for h in self.hess.iter_mut() {
            *h *= rhs;
        }
        self
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(self, rhs: f64) -> Jet {
        self * (1.0 / rhs)
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        rhs * self
    }
}

impl Add<Jet> for f64 {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        rhs + self
    }
}

impl Sub<Jet> for f64 {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        -rhs + self
    }
}

impl AddAssign for Jet {
    fn add_assign(&mut self, rhs: Jet) {
        *self = *self + rhs;
    }
}

impl SubAssign for Jet {
    fn sub_assign(&mut self, rhs: Jet) {
        *self = *self - rhs;
    }
}

impl MulAssign<f64> for Jet {
    fn mul_assign(&mut self, rhs: f64) {
        *self = *self * rhs;
    }
}

impl core::iter::Sum for Jet {
    fn sum<I: Iterator<Item = Jet>>(iter: I) -> Jet {
        iter.fold(Jet::constant(0.0), |a, b| a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule() {
        let x = Jet::seed(&[3.0, 4.0], 2);
        let p = x[0] * x[1];
        assert_eq!(p.value(), 12.0);
        assert_eq!((p.grad(0), p.grad(1)), (4.0, 3.0));
        assert_eq!(p.hess(0, 1), 1.0);
        assert_eq!(p.hess(0, 0), 0.0);
    }

    #[test]
    fn partial_lowers_order() {
        let x = Jet::seed(&[5.0], 2);
        let sq = x[0] * x[0];
        let d = sq.partial(0);
        assert_eq!((d.value(), d.grad(0), d.order()), (10.0, 2.0, 1));
        let dd = d.partial(0);
        assert_eq!((dd.value(), dd.order()), (2.0, 0));
        assert_eq!(dd.grad(0), 0.0);
    }

    #[test]
    fn constants_do_not_cap_order() {
        let x = Jet::seed(&[1.0], 2);
        assert_eq!((x[0] * Jet::constant(2.0)).order(), 2);
        assert_eq!((x[0].truncate(1) * 2.0).order(), 1);
    }

    #[test]
    fn quotient_matches_closed_form() {
        let x = Jet::seed(&[2.0], 2);
        let q = Jet::constant(1.0) / x[0];
        assert!((q.grad(0) + 0.25).abs() < 1e-15);
        assert!((q.hess(0, 0) - 0.25).abs() < 1e-15);
    }
}
