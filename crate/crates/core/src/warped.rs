//! Warped products `T ×_f B̃` with a possibly degenerate fibre metric.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::foliation::radical_frame;
use crate::geometry::{Metric, MetricField};
use crate::jet::Jet;
use crate::linalg::{self, JetMat, JetVec};

/// Fibre metric: explicit entries or the pullback `j*h` along an embedding.
#[derive(Debug, Clone, PartialEq)]
pub enum FibreMetric {
    Field(MetricField),
    Pullback { target: MetricField, embedding: Vec<Expr> },
}

impl FibreMetric {
    pub fn dim(&self) -> usize {
        match self {
            FibreMetric::Field(m) => m.dim(),
            FibreMetric::Pullback { embedding, .. } => embedding.iter().map(|e| e.max_coord()).max().unwrap_or(0),
        }
    }

    /// Components at a point of the fibre chart, seeded locally to `order`.
    /// A pullback loses one derivative level to the embedding Jacobian, so
    /// at `order` 2 its components carry order 1.
    pub fn matrix_at(&self, u: &[f64], order: u8) -> Result<JetMat> {
        match self {
            FibreMetric::Field(m) => m.matrix_with(&Jet::seed(u, order)),
            FibreMetric::Pullback { target, embedding } => {
                let x = Jet::seed(u, (order + 1).min(2));
                let m = u.len();
                let j = embedding.iter().map(|e| e.eval_with(&x)).collect::<Result<Vec<_>, _>>()?;
                let h = target.matrix_with(&j)?;
                let dj: Vec<JetVec> = j.iter().map(|ja| (0..m).map(|i| ja.partial(i)).collect()).collect();
                let k = j.len();
                Ok((0..m)
                    .map(|a| {
                        (0..m)
                            .map(|b| {
                                let mut acc = Jet::constant(0.0);
                                for s in 0..k {
                                    for t in 0..k {
                                        acc += h[s][t] * dj[s][a] * dj[t][b];
                                    }
                                }
                                acc.truncate(order)
                            })
                            .collect()
                    })
                    .collect())
            }
        }
    }
}

/// `ĝ = p1* g_T + (f∘p1)² p2* g_B̃` on the product chart, base coordinates first.
#[derive(Debug, Clone, PartialEq)]
pub struct WarpedMetric {
    pub base: MetricField,
    pub fibre: FibreMetric,
    pub fibre_dim: usize,
    pub warp: Expr,
    /// Radical rank of the fibre metric.
    pub rho: usize,
}

impl WarpedMetric {
    pub fn new(base: MetricField, fibre: FibreMetric, warp: Expr, rho: usize) -> Result<WarpedMetric> {
        let fibre_dim = match &fibre {
            FibreMetric::Field(m) => m.dim(),
            FibreMetric::Pullback { .. } => fibre.dim(),
        };
        if base.dim() + fibre_dim > crate::jet::MAX_DIM {
            return Err(Error::Invalid("warped product exceeds the chart dimension limit".into()));
        }
        if warp.max_coord() > base.dim() {
            return Err(Error::Invalid("warping function may only depend on base coordinates".into()));
        }
        Ok(WarpedMetric { base, fibre, fibre_dim, warp, rho })
    }

    pub fn base_dim(&self) -> usize {
        self.base.dim()
    }
}

impl Metric for WarpedMetric {
    fn dim(&self) -> usize {
        self.base.dim() + self.fibre_dim
    }

    fn declared_index(&self) -> Option<usize> {
        match (&self.fibre, self.rho, self.base.declared_index()) {
            (FibreMetric::Field(m), 0, Some(s)) => m.declared_index().map(|t| s + t),
            _ => None,
        }
    }

    fn matrix_with(&self, x: &[Jet]) -> Result<JetMat> {
        let q = self.base.dim();
        let n = self.dim();
        let f = self.warp.eval_with(&x[..q])?;
        if !(f.value() > 0.0) {
            return Err(Error::NonPositiveWarp(linalg::vec_values(x)));
        }
        let gt = self.base.matrix_with(&x[..q])?;
        let order = x.iter().map(|j| j.order()).min().unwrap_or(2);
        let u: Vec<f64> = x[q..].iter().map(|j| j.value()).collect();
        let gb = self.fibre.matrix_at(&u, order)?;
        let f2 = f * f;
        let mut g = vec![vec![Jet::constant(0.0); n]; n];
        for i in 0..q {
            for j in 0..q {
                g[i][j] = gt[i][j];
            }
        }
        for i in 0..self.fibre_dim {
            for j in 0..self.fibre_dim {
                g[q + i][q + j] = f2 * gb[i][j].shifted(q, n);
            }
        }
        Ok(g)
    }
}

/// Metric values of `ĝ` at `(y, x̃)`.
pub fn assemble_warped_metric(w: &WarpedMetric, p: &[f64]) -> Result<Vec<Vec<f64>>> {
    Ok(linalg::values(&w.matrix_with(&Jet::seed(p, 0))?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FibreRadical {
    /// Radical of `ĝ` on `Ker dp1`, as computed by the foliation machinery.
    pub radical: Vec<Vec<f64>>,
    /// Radical of `g_B̃` injected into the product chart.
    pub injected: Vec<Vec<f64>>,
    pub span_residual: f64,
}

/// Compares the radical of the fibre foliation with the injected fibre radical.
pub fn fibre_radical_check(w: &WarpedMetric, p: &[f64]) -> Result<FibreRadical> {
    let q = w.base_dim();
    let n = w.dim();
    let g = w.matrix_with(&Jet::seed(p, 1))?;
    let tangent: Vec<JetVec> = (q..n)
        .map(|k| (0..n).map(|c| Jet::constant(if c == k { 1.0 } else { 0.0 })).collect())
        .collect();
    let (rad, _) = radical_frame(&g, &tangent, None, p)?;
    let radical: Vec<Vec<f64>> = rad.iter().map(|v| linalg::vec_values(v)).collect();
    if radical.len() != w.rho {
        return Err(Error::RankMismatch { expected: w.rho, found: radical.len() });
    }
    let gb = linalg::values(&w.fibre.matrix_at(&p[q..], 1)?);
    let (ev, vecs) = linalg::sym_eigen(&gb);
    let top = linalg::norm_inf(&ev);
    let injected: Vec<Vec<f64>> = (0..ev.len())
        .filter(|&k| ev[k].abs() <= crate::foliation::RANK_TOL * top.max(1.0))
        .map(|k| (0..n).map(|c| if c < q { 0.0 } else { vecs[c - q][k] }).collect())
        .collect();
    if injected.len() != w.rho {
        return Err(Error::RankMismatch { expected: w.rho, found: injected.len() });
    }
    let span_residual = linalg::span_residual(&radical, &injected).max(linalg::span_residual(&injected, &radical));
    Ok(FibreRadical { radical, injected, span_residual })
}
