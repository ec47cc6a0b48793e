//! The one-dimensional foliation tangent to a lightlike Killing field.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::foliation::{classify, Kind};
use crate::forms::{basic_residual, Convention, FormField, FormJet};
use crate::geometry::{bracket, is_killing, MetricAt, VectorField};
use crate::jet::Jet;
use crate::linalg::{self, JetVec};
use crate::scenario::AnyMetric;
use crate::Metric;

/// Bound on `|g(ξ,ξ)|`.
pub const NULL_TOL: f64 = 1e-9;
/// Lower bound on `|g(ξ,V)|`.
pub const PAIRING_TOL: f64 = 1e-6;
/// Bound on order-2 residuals: basicness, closedness, `[W,N]`.
pub const FORM_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct FlowScenario {
    pub metric: AnyMetric,
    pub xi: VectorField,
    pub v: VectorField,
    pub w: Option<VectorField>,
    pub convention: Convention,
}

/// Fields of a flow scenario at one point, as jets.
#[derive(Debug, Clone)]
pub struct FlowFrame {
    pub mat: MetricAt,
    pub xi: JetVec,
    pub v: JetVec,
    pub n: JetVec,
    pub w: Option<JetVec>,
}

impl FlowFrame {
    /// `α = g(·, N)`.
    pub fn alpha(&self) -> FormJet {
        FormJet::one_form(&self.mat.lower(&self.n))
    }
    /// `μ = g(·, ξ)`.
    pub fn mu(&self) -> FormJet {
        FormJet::one_form(&self.mat.lower(&self.xi))
    }
    /// `η = g(·, W)`.
    pub fn eta(&self) -> Option<FormJet> {
        self.w.as_ref().map(|w| FormJet::one_form(&self.mat.lower(w)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowN {
    pub n: Vec<f64>,
    /// `|g(ξ,N) − 1|`
    pub pairing_residual: f64,
    /// `|g(N,N)|`
    pub null_residual: f64,
    /// `|L_ξ N|`
    pub invariance_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaIngredient {
    /// Components of `dα ∧ ω`.
    pub form: Vec<f64>,
    pub basic_residual: f64,
    pub closed_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplementedReport {
    pub d_mu: f64,
    pub d_eta: f64,
    pub mu_basic: f64,
    pub eta_basic: f64,
    /// `dμ(N,W) / (μ∧η)(N,W)`
    pub h: f64,
    /// `g(ξ, [W,N])`
    pub h_bracket: f64,
    /// Solvability of `N(b) − W(a) = f` is taken on trust.
    pub condition_3_assumed: bool,
}

impl ComplementedReport {
    pub fn max_residual(&self) -> f64 {
        [self.d_mu, self.d_eta, self.mu_basic, self.eta_basic, self.h.abs(), self.h_bracket.abs()]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

impl FlowScenario {
    pub fn new(metric: impl Into<AnyMetric>, xi: VectorField, v: VectorField, w: Option<VectorField>) -> FlowScenario {
        FlowScenario { metric: metric.into(), xi, v, w, convention: Convention::UnitShuffle }
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    /// Leaves are the orbits: `m = r = 1`, `q = n − 1`.
    pub fn kind(&self) -> Result<Kind> {
        let n = self.dim();
        classify(1, n - 1, 1)
    }

    /// Checks `g(ξ,ξ) = 0`, the Killing equation and `g(ξ,V) ≠ 0` at every sample.
    pub fn validate(&self, samples: &[Vec<f64>]) -> Result<()> {
        for p in samples {
            let mat = MetricAt::new(&self.metric, p)?;
            let xi = self.xi.eval_with(&mat.x)?;
            let v = self.v.eval_with(&mat.x)?;
            let nn = mat.inner(&xi, &xi).value().abs();
            if nn > NULL_TOL {
                return Err(Error::HypothesisFailure { which: 0, detail: alloc::format!("g(xi,xi) = {nn:e} at {p:?}") });
            }
            if mat.inner(&xi, &v).value().abs() < PAIRING_TOL {
                return Err(Error::DegeneratePairing(p.to_vec()));
            }
        }
        let (ok, res) = is_killing(&self.metric, &self.xi, samples, None)?;
        if !ok {
            return Err(Error::HypothesisFailure { which: 0, detail: alloc::format!("xi is not Killing (residual {res:e})") });
        }
        Ok(())
    }

    /// Jets of `ξ`, `V`, `N` and `W` at `p`, with
    /// `N = (1/g(ξ,V)) {V − g(V,V)/(2 g(ξ,V)) ξ}`.
    pub fn frame_at(&self, p: &[f64]) -> Result<FlowFrame> {
        let mat = MetricAt::new(&self.metric, p)?;
        let xi = self.xi.eval_with(&mat.x)?;
        let v = self.v.eval_with(&mat.x)?;
        let gxv = mat.inner(&xi, &v);
        if gxv.value().abs() < PAIRING_TOL {
            return Err(Error::DegeneratePairing(p.to_vec()));
        }
        let gvv = mat.inner(&v, &v);
        let c = gvv / (gxv * 2.0);
        let n = linalg::scale(gxv.recip(), &linalg::sub(&v, &linalg::scale(c, &xi)));
        let w = self.w.as_ref().map(|w| w.eval_with(&mat.x)).transpose()?;
        Ok(FlowFrame { mat, xi, v, n, w })
    }
}

pub fn build_n_flow(s: &FlowScenario, p: &[f64]) -> Result<FlowN> {
    let f = s.frame_at(p)?;
    Ok(FlowN {
        n: linalg::vec_values(&f.n),
        pairing_residual: (f.mat.inner(&f.xi, &f.n).value() - 1.0).abs(),
        null_residual: f.mat.inner(&f.n, &f.n).value().abs(),
        invariance_residual: linalg::norm_inf(&linalg::vec_values(&bracket(&f.xi, &f.n))),
    })
}

/// `α(X) = g(X, N)`.
pub fn alpha_form(s: &FlowScenario, x: &[f64], p: &[f64]) -> Result<f64> {
    let f = s.frame_at(p)?;
    Ok(f.mat.inner(&linalg::constant_vec(x), &f.n).value())
}

/// Largest component of `L_ξ α`.
pub fn alpha_invariance(s: &FlowScenario, p: &[f64]) -> Result<f64> {
    let f = s.frame_at(p)?;
    Ok(f.alpha().lie(&f.xi)?.max_abs())
}

/// `dα ∧ ω` for a basic closed form `ω`, with its basicness and closedness.
pub fn delta_ingredient(s: &FlowScenario, omega: &FormField, p: &[f64]) -> Result<DeltaIngredient> {
    let f = s.frame_at(p)?;
    let w = omega.eval_with(&f.mat.x)?;
    let frame = vec![f.xi.clone()];
    let b = basic_residual(&w, &frame)?;
    if b > FORM_TOL {
        return Err(Error::NotBasic(b));
    }
    if w.degree() < w.dim() {
        let c = w.d()?.max_abs();
        if c > FORM_TOL {
            return Err(Error::NotClosed(c));
        }
    }
    let out = f.alpha().d()?.wedge(&w, s.convention)?;
    let closed_residual = if out.degree() < out.dim() { out.d()?.max_abs() } else { 0.0 };
    Ok(DeltaIngredient {
        form: out.components().iter().map(|c| c.value()).collect(),
        basic_residual: basic_residual(&out, &frame)?,
        closed_residual,
    })
}

/// The closedness of `μ` and `η` on a complemented three-dimensional flow.
pub fn complemented_checks(s: &FlowScenario, p: &[f64]) -> Result<ComplementedReport> {
    if s.dim() != 3 {
        return Err(Error::Invalid("complemented flows are three-dimensional".to_string()));
    }
    let f = s.frame_at(p)?;
    let w = f.w.as_ref().ok_or_else(|| Error::Invalid("complemented flow needs W".to_string()))?;
    let wn = linalg::norm_inf(&linalg::vec_values(&bracket(w, &f.n)));
    if wn > FORM_TOL {
        return Err(Error::HypothesisFailure { which: 1, detail: alloc::format!("[W,N] = {wn:e}") });
    }
    let gww = f.mat.inner(w, w).value();
    let gxn = f.mat.inner(&f.xi, &f.n).value();
    if gww <= 0.0 || (gxn - 1.0).abs() > NULL_TOL {
        return Err(Error::HypothesisFailure { which: 2, detail: alloc::format!("g(W,W) = {gww}, g(xi,N) = {gxn}") });
    }
    let mu = f.mu();
    let eta = f.eta().expect("W present");
    let frame = vec![f.xi.clone()];
    let dmu = mu.d()?;
    let nw = [f.n.clone(), w.clone()];
    let h = dmu.eval(&nw).value() / mu.wedge(&eta, s.convention)?.eval(&nw).value();
    Ok(ComplementedReport {
        d_mu: dmu.max_abs(),
        d_eta: eta.d()?.max_abs(),
        mu_basic: basic_residual(&mu, &frame)?,
        eta_basic: basic_residual(&eta, &frame)?,
        h,
        h_bracket: f.mat.inner(&f.xi, &bracket(w, &f.n)).value(),
        condition_3_assumed: true,
    })
}

/// For `ω` with `L_ξ ω = 0`: `(|L_ξ ω|, basic residual of i_ξ ω)`.
pub fn contraction_check(s: &FlowScenario, omega: &FormField, p: &[f64]) -> Result<(f64, f64)> {
    let f = s.frame_at(p)?;
    let w = omega.eval_with(&f.mat.x)?;
    let lie = w.lie(&f.xi)?.max_abs();
    let iw = w.interior(&f.xi)?;
    Ok((lie, basic_residual(&iw, core::slice::from_ref(&f.xi))?))
}

/// Residual of `Ω = f μ∧η` for a basic two-form on a complemented flow,
/// evaluated on pairs from `(ξ, N, W)`.
pub fn basic_two_form_residual(s: &FlowScenario, omega: &FormField, p: &[f64]) -> Result<f64> {
    let f = s.frame_at(p)?;
    let w = f.w.as_ref().ok_or_else(|| Error::Invalid("complemented flow needs W".to_string()))?;
    if omega.k != 2 {
        return Err(Error::Invalid("expected a two-form".to_string()));
    }
    let om = omega.eval_with(&f.mat.x)?;
    let me = f.mu().wedge(&f.eta().expect("W present"), s.convention)?;
    let nw = [f.n.clone(), w.clone()];
    let coef = om.eval(&nw).value() / me.eval(&nw).value();
    let rest = om.add(&me.scale(Jet::constant(-coef)));
    let frame = [f.xi.clone(), f.n.clone(), w.clone()];
    let mut worst = 0.0f64;
    for i in 0..3 {
        for j in i + 1..3 {
            worst = worst.max(rest.eval(&[frame[i].clone(), frame[j].clone()]).value().abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::MetricField;

    fn flat_flow() -> FlowScenario {
        FlowScenario::new(
            MetricField::flat(3, 1).unwrap(),
            VectorField::constant(&[1.0, 1.0, 0.0]),
            VectorField::constant(&[1.0, 0.0, 0.0]),
            Some(VectorField::constant(&[0.0, 0.0, 1.0])),
        )
    }

    #[test]
    fn flat_n() {
        let s = flat_flow();
        let r = build_n_flow(&s, &[0.1, 0.2, 0.3]).unwrap();
        assert!(r.pairing_residual < 1e-12 && r.null_residual < 1e-12);
        // N = -∂1 + ξ/2
        let expect = [-0.5, 0.5, 0.0];
        for (a, b) in r.n.iter().zip(expect) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(matches!(s.kind().unwrap(), Kind::Isotropic));
    }

    #[test]
    fn v_equal_xi_is_degenerate() {
        let mut s = flat_flow();
        s.v = s.xi.clone();
        assert!(matches!(build_n_flow(&s, &[0.0, 0.0, 0.0]), Err(Error::DegeneratePairing(_))));
    }
}
