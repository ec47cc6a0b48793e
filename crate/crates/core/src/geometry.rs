//! Levi-Civita calculus at a point.

use alloc::boxed::Box;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::expr::{parse_expression, Expr};
use crate::jet::Jet;
use crate::linalg::{self, JetMat, JetVec};

/// Anything that yields metric components from coordinate jets.
pub trait Metric {
    fn dim(&self) -> usize;
    /// Declared number of negative directions, if the metric is nondegenerate.
    fn declared_index(&self) -> Option<usize>;
    fn matrix_with(&self, x: &[Jet]) -> Result<JetMat>;
}

/// Symmetric matrix of coordinate expressions.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricField {
    dim: usize,
    index: Option<usize>,
    // packed upper triangle, row-major
    entries: Vec<Expr>,
}

fn packed(i: usize, j: usize, n: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    a * n - a * (a + 1) / 2 + b
}

impl MetricField {
    /// Builds from a full matrix; `entries[i][j]` must equal `entries[j][i]`.
    pub fn new(index: Option<usize>, entries: Vec<Vec<Expr>>) -> Result<MetricField> {
        let n = entries.len();
        if n == 0 || n > crate::jet::MAX_DIM || entries.iter().any(|r| r.len() != n) {
            return Err(Error::Invalid("metric must be a square matrix of size 1..=8".to_string()));
        }
        if let Some(s) = index {
            if s > n {
                return Err(Error::InvalidSignature { n, s });
            }
        }
        let mut packed_entries = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                if entries[i][j] != entries[j][i] {
                    return Err(Error::Invalid(alloc::format!("metric entry ({},{}) is not symmetric", i + 1, j + 1)));
                }
                if entries[i][j].max_coord() > n {
                    return Err(Error::Invalid(alloc::format!("metric entry ({},{}) uses a coordinate beyond x{}", i + 1, j + 1, n)));
                }
                packed_entries.push(entries[i][j].clone());
            }
        }
        Ok(MetricField { dim: n, index, entries: packed_entries })
    }

    /// Diagonal metric from expressions.
    pub fn diagonal(index: Option<usize>, diag: Vec<Expr>) -> Result<MetricField> {
        let n = diag.len();
        let mut m = vec![vec![Expr::Lit(0.0); n]; n];
        for (i, d) in diag.into_iter().enumerate() {
            m[i][i] = d;
        }
        MetricField::new(index, m)
    }

    /// Constant flat metric `diag(-1 (s times), +1 (n-s times))`.
    pub fn flat(n: usize, s: usize) -> Result<MetricField> {
        if s > n {
            return Err(Error::InvalidSignature { n, s });
        }
        MetricField::diagonal(Some(s), (0..n).map(|i| Expr::Lit(if i < s { -1.0 } else { 1.0 })).collect())
    }

    /// Diagonal metric from expression strings.
    pub fn parse_diagonal(index: Option<usize>, diag: &[&str]) -> Result<MetricField> {
        let n = diag.len();
        let d = diag.iter().map(|t| parse_expression(t, n)).collect::<Result<Vec<_>, _>>()?;
        MetricField::diagonal(index, d)
    }

    pub fn entry(&self, i: usize, j: usize) -> &Expr {
        &self.entries[packed(i, j, self.dim)]
    }
}

impl Metric for MetricField {
    fn dim(&self) -> usize {
        self.dim
    }
    fn declared_index(&self) -> Option<usize> {
        self.index
    }
    fn matrix_with(&self, x: &[Jet]) -> Result<JetMat> {
        let n = self.dim;
        let mut g = vec![vec![Jet::constant(0.0); n]; n];
        for i in 0..n {
            for j in i..n {
                let v = self.entry(i, j).eval_with(x)?;
                g[i][j] = v;
                g[j][i] = v;
            }
        }
        Ok(g)
    }
}

impl<M: Metric + ?Sized> Metric for Box<M> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn declared_index(&self) -> Option<usize> {
        (**self).declared_index()
    }
    fn matrix_with(&self, x: &[Jet]) -> Result<JetMat> {
        (**self).matrix_with(x)
    }
}

/// Coordinate components of a vector field.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub comps: Vec<Expr>,
}

impl VectorField {
    pub fn new(comps: Vec<Expr>) -> VectorField {
        VectorField { comps }
    }

    pub fn parse(texts: &[&str], dim: usize) -> Result<VectorField> {
        if texts.len() != dim {
            return Err(Error::Invalid(alloc::format!("vector field needs {} components, got {}", dim, texts.len())));
        }
        Ok(VectorField { comps: crate::expr::parse_all(texts, dim)? })
    }

    pub fn constant(v: &[f64]) -> VectorField {
        VectorField { comps: v.iter().map(|&c| Expr::Lit(c)).collect() }
    }

    pub fn coordinate(i: usize, n: usize) -> VectorField {
        VectorField::constant(&(0..n).map(|k| if k == i { 1.0 } else { 0.0 }).collect::<Vec<_>>())
    }

    pub fn eval_with(&self, x: &[Jet]) -> Result<JetVec> {
        Ok(self.comps.iter().map(|c| c.eval_with(x)).collect::<Result<Vec<_>, _>>()?)
    }
}

/// `X(f) = X^i ∂_i f`.
pub fn apply(x: &[Jet], f: &Jet) -> Jet {
    x.iter().enumerate().map(|(i, xi)| *xi * f.partial(i)).sum()
}

/// `[X,Y]^k = X^i ∂_i Y^k − Y^i ∂_i X^k`.
pub fn bracket(x: &[Jet], y: &[Jet]) -> JetVec {
    (0..x.len()).map(|k| apply(x, &y[k]) - apply(y, &x[k])).collect()
}

/// Bilinear form `Σ g_ij u^i v^j`.
pub fn pair(g: &[Vec<Jet>], u: &[Jet], v: &[Jet]) -> Jet {
    let mut acc = Jet::constant(0.0);
    for (i, row) in g.iter().enumerate() {
        for (j, gij) in row.iter().enumerate() {
            acc += *gij * u[i] * v[j];
        }
    }
    acc
}

/// Metric components at a point, seeded to second order.
pub fn metric_at(metric: &dyn Metric, p: &[f64]) -> Result<JetMat> {
    metric.matrix_with(&Jet::seed(p, 2))
}

/// Metric, inverse and Christoffel symbols at a point.
#[derive(Debug, Clone)]
pub struct MetricAt {
    pub point: Vec<f64>,
    pub x: JetVec,
    pub g: JetMat,
    pub ginv: JetMat,
    /// `gamma[k][i][j] = Γ^k_ij`
    pub gamma: Vec<JetMat>,
}

impl MetricAt {
    pub fn new(metric: &dyn Metric, p: &[f64]) -> Result<MetricAt> {
        if p.len() != metric.dim() {
            return Err(Error::Invalid(alloc::format!("point has {} coordinates, chart has {}", p.len(), metric.dim())));
        }
        let x = Jet::seed(p, 2);
        let g = metric.matrix_with(&x)?;
        let n = g.len();
        let (_, ginv) = linalg::inverse(&g).ok_or_else(|| Error::SingularMetric(p.to_vec()))?;
        let dg: Vec<Vec<JetVec>> = (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|l| g[i][j].partial(l)).collect()).collect())
            .collect();
        let mut gamma = vec![vec![vec![Jet::constant(0.0); n]; n]; n];
        for i in 0..n {
            for j in i..n {
                // lowered symbol Γ_{l,ij}
                let low: JetVec = (0..n).map(|l| (dg[j][l][i] + dg[i][l][j] - dg[i][j][l]) * 0.5).collect();
                for k in 0..n {
                    let v: Jet = (0..n).map(|l| ginv[k][l] * low[l]).sum();
                    gamma[k][i][j] = v;
                    gamma[k][j][i] = v;
                }
            }
        }
        Ok(MetricAt { point: p.to_vec(), x, g, ginv, gamma })
    }

    pub fn dim(&self) -> usize {
        self.g.len()
    }

    pub fn inner(&self, u: &[Jet], v: &[Jet]) -> Jet {
        pair(&self.g, u, v)
    }

    /// Covector `g(v, ·)`.
    pub fn lower(&self, v: &[Jet]) -> JetVec {
        (0..self.dim()).map(|i| (0..self.dim()).map(|j| self.g[i][j] * v[j]).sum()).collect()
    }

    pub fn raise(&self, w: &[Jet]) -> JetVec {
        (0..self.dim()).map(|i| (0..self.dim()).map(|j| self.ginv[i][j] * w[j]).sum()).collect()
    }

    /// `(∇_X Y)^k = X^i ∂_i Y^k + Γ^k_ij X^i Y^j`.
    pub fn covariant(&self, x: &[Jet], y: &[Jet]) -> JetVec {
        let n = self.dim();
        (0..n)
            .map(|k| {
                let mut acc = apply(x, &y[k]);
                for i in 0..n {
                    for j in 0..n {
                        acc += self.gamma[k][i][j] * x[i] * y[j];
                    }
                }
                acc
            })
            .collect()
    }

    /// `(∇f)^k = g^{kj} ∂_j f`.
    pub fn gradient(&self, f: &Jet) -> JetVec {
        let df: JetVec = (0..self.dim()).map(|j| f.partial(j)).collect();
        self.raise(&df)
    }

    /// `X(Y(f)) − (∇_X Y)(f)`.
    pub fn hessian(&self, f: &Jet, x: &[Jet], y: &[Jet]) -> Jet {
        apply(x, &apply(y, f)) - apply(&self.covariant(x, y), f)
    }

    /// Components `∂_i∂_j f − Γ^k_ij ∂_k f`.
    pub fn hessian_tensor(&self, f: &Jet) -> JetMat {
        let n = self.dim();
        let df: JetVec = (0..n).map(|k| f.partial(k)).collect();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut h = df[i].partial(j);
                        for k in 0..n {
                            h -= self.gamma[k][i][j] * df[k];
                        }
                        h
                    })
                    .collect()
            })
            .collect()
    }

    /// `g^{ij}(∂_i∂_j f − Γ^k_ij ∂_k f)`.
    pub fn laplace_beltrami(&self, f: &Jet) -> Jet {
        let h = self.hessian_tensor(f);
        let n = self.dim();
        let mut acc = Jet::constant(0.0);
        for i in 0..n {
            for j in 0..n {
                acc += self.ginv[i][j] * h[i][j];
            }
        }
        acc
    }

    /// `(L_X g)_ij = X^k ∂_k g_ij + g_kj ∂_i X^k + g_ik ∂_j X^k`.
    pub fn lie_metric(&self, x: &[Jet]) -> JetMat {
        let n = self.dim();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut acc = apply(x, &self.g[i][j]);
                        for k in 0..n {
                            acc += self.g[k][j] * x[k].partial(i) + self.g[i][k] * x[k].partial(j);
                        }
                        acc
                    })
                    .collect()
            })
            .collect()
    }

    /// `(L_X g)(Y,Z) = X(g(Y,Z)) − g([X,Y],Z) − g(Y,[X,Z])` for fields.
    pub fn lie_metric_on(&self, x: &[Jet], y: &[Jet], z: &[Jet]) -> Jet {
        apply(x, &self.inner(y, z)) - self.inner(&bracket(x, y), z) - self.inner(y, &bracket(x, z))
    }
}

/// Counts negative eigenvalues of the metric at `p` and compares them with
/// the declared index.
pub fn check_signature(metric: &dyn Metric, p: &[f64]) -> Result<usize> {
    let g = metric.matrix_with(&Jet::seed(p, 0))?;
    let (neg, zero, _) = linalg::inertia(&linalg::values(&g), 1e-8);
    if zero > 0 {
        return Err(Error::SingularMetric(p.to_vec()));
    }
    match metric.declared_index() {
        Some(s) if s != neg => Err(Error::SignatureMismatch { declared: s, found: neg, point: p.to_vec() }),
        _ => Ok(neg),
    }
}

pub fn christoffel(metric: &dyn Metric, p: &[f64]) -> Result<Vec<Vec<Vec<f64>>>> {
    let m = MetricAt::new(metric, p)?;
    Ok(m.gamma.iter().map(|gk| linalg::values(gk)).collect())
}

pub fn covariant_derivative(metric: &dyn Metric, x: &VectorField, y: &VectorField, p: &[f64]) -> Result<Vec<f64>> {
    let m = MetricAt::new(metric, p)?;
    Ok(linalg::vec_values(&m.covariant(&x.eval_with(&m.x)?, &y.eval_with(&m.x)?)))
}

pub fn bracket_at(x: &VectorField, y: &VectorField, p: &[f64]) -> Result<Vec<f64>> {
    let s = Jet::seed(p, 1);
    Ok(linalg::vec_values(&bracket(&x.eval_with(&s)?, &y.eval_with(&s)?)))
}

pub fn gradient(metric: &dyn Metric, f: &Expr, p: &[f64]) -> Result<Vec<f64>> {
    let m = MetricAt::new(metric, p)?;
    Ok(linalg::vec_values(&m.gradient(&f.eval_with(&m.x)?)))
}

pub fn hessian(metric: &dyn Metric, f: &Expr, x: &VectorField, y: &VectorField, p: &[f64]) -> Result<f64> {
    let m = MetricAt::new(metric, p)?;
    Ok(m.hessian(&f.eval_with(&m.x)?, &x.eval_with(&m.x)?, &y.eval_with(&m.x)?).value())
}

pub fn laplace_beltrami(metric: &dyn Metric, f: &Expr, p: &[f64]) -> Result<f64> {
    let m = MetricAt::new(metric, p)?;
    Ok(m.laplace_beltrami(&f.eval_with(&m.x)?).value())
}

pub fn lie_derivative_metric(metric: &dyn Metric, x: &VectorField, p: &[f64]) -> Result<Vec<Vec<f64>>> {
    let s = Jet::seed(p, 2);
    let g = metric.matrix_with(&s)?;
    let xv = x.eval_with(&s)?;
    let n = g.len();
    Ok((0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut acc = apply(&xv, &g[i][j]);
                    for k in 0..n {
                        acc += g[k][j] * xv[k].partial(i) + g[i][k] * xv[k].partial(j);
                    }
                    acc.value()
                })
                .collect()
        })
        .collect())
}

/// Killing test over samples; tolerance `1e-9 * max(1, metric scale)` unless
/// overridden.
pub fn is_killing(metric: &dyn Metric, x: &VectorField, samples: &[Vec<f64>], tol: Option<f64>) -> Result<(bool, f64)> {
    let mut worst = 0.0f64;
    let mut scale = 1.0f64;
    for p in samples {
        let l = lie_derivative_metric(metric, x, p)?;
        let fro = libm::sqrt(l.iter().flatten().map(|v| v * v).sum::<f64>());
        worst = worst.max(fro);
        let g = metric.matrix_with(&Jet::seed(p, 0))?;
        scale = scale.max(linalg::max_abs_value(&g));
    }
    let tol = tol.unwrap_or(1e-9 * scale);
    Ok((worst <= tol, worst))
}
