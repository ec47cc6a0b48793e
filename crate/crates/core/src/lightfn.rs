//! Foliations by level sets of lightlike functions.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::charforms::{kappa, KappaRoute};
use crate::error::{Error, Result};
use crate::expr::{BinOp, Expr};
use crate::foliation::{FoliationPlan, FoliationSpec, RadicalChoice};
use crate::forms::Convention;
use crate::geometry::{apply, check_signature, MetricAt, MetricField, VectorField};
use crate::jet::Jet;
use crate::linalg::{self, JetVec};
use crate::scenario::{AnyMetric, Scenario};
use crate::transversal::FrameBundle;
use crate::Metric;

/// Bound on `|g(∇f, ∇f)|` and on `|∇f|` from below.
pub const NULL_TOL: f64 = 1e-9;
/// Lower bound on `|V(f)|`.
pub const PAIRING_TOL: f64 = 1e-6;
/// Bound on `X(f)` for a vector declared tangent.
pub const TANGENT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct LightlikeFunctionScenario {
    pub metric: AnyMetric,
    pub f: Expr,
    pub v: VectorField,
    pub screen_seed: Option<Vec<VectorField>>,
    pub convention: Convention,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LightlikeReport {
    /// Largest `|g(∇f,∇f)|`.
    pub null_residual: f64,
    /// Smallest `max_i |∂_i f|`.
    pub min_gradient: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelsetN {
    pub n: Vec<f64>,
    /// `|g(N,N)|`
    pub null_residual: f64,
    /// `|N(f) − 1|`
    pub nf_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondFundamental {
    /// Coefficient `c` in `σ h(X,Y) = c N`, read from `Π ∇_X Y`.
    pub coefficient: f64,
    /// `Hess_f(X,Y)` from the Hessian tensor.
    pub hess: f64,
}

impl SecondFundamental {
    pub fn residual(&self) -> f64 {
        (self.coefficient + self.hess).abs()
    }
}

/// Terms of the `2κ(N)` formula next to the definition route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaN {
    /// `(L_ξ g)(N,N)`
    pub lie_xi_nn: f64,
    /// `Σ ε_a (L_V g)(X_a, X_a)`
    pub trace_lie_v: f64,
    /// `□f`
    pub box_f: f64,
    /// `Hess_f(ξ, N)`
    pub hess_xi_n: f64,
    pub v_f: f64,
    pub g_vv: f64,
    /// κ(N) from the formula.
    pub formula: f64,
    /// κ(N) from the bracket definition.
    pub definition: f64,
}

impl KappaN {
    pub fn residual(&self) -> f64 {
        (self.formula - self.definition).abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScreenIndex {
    pub index: usize,
    /// `g(ξ + N/2, ξ + N/2)`
    pub plus: f64,
    /// `g(ξ − N/2, ξ − N/2)`
    pub minus: f64,
    /// Largest `|g(ξ ± N/2, X_a)|` and `|g(ξ + N/2, ξ − N/2)|`.
    pub orthogonality: f64,
}

impl LightlikeFunctionScenario {
    pub fn new(metric: impl Into<AnyMetric>, f: Expr, v: VectorField) -> LightlikeFunctionScenario {
        LightlikeFunctionScenario { metric: metric.into(), f, v, screen_seed: None, convention: Convention::UnitShuffle }
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    /// The level-set foliation with `ξ = ∇f` and complement `V`.
    pub fn scenario(&self) -> Scenario {
        let spec = FoliationSpec::LevelFunctions { funcs: vec![self.f.clone()], pivots: None };
        let mut s = Scenario::new(self.metric.clone(), spec, vec![self.v.clone()]);
        s.foliation.radical = RadicalChoice::Gradient(0);
        s.foliation.screen_tan_seed = self.screen_seed.clone();
        s.convention = self.convention;
        s
    }

    pub fn bundle_at(&self, p: &[f64], plan: Option<&FoliationPlan>) -> Result<(FrameBundle, FoliationPlan)> {
        self.scenario().bundle_at(p, plan)
    }

    fn at(&self, p: &[f64]) -> Result<(MetricAt, Jet, JetVec, JetVec)> {
        let mat = MetricAt::new(&self.metric, p)?;
        let f = self.f.eval_with(&mat.x)?;
        let xi = mat.gradient(&f);
        let v = self.v.eval_with(&mat.x)?;
        Ok((mat, f, xi, v))
    }
}

/// Null and nonvanishing checks on `∇f` over the samples.
pub fn verify_lightlike(s: &LightlikeFunctionScenario, samples: &[Vec<f64>]) -> Result<LightlikeReport> {
    let mut report = LightlikeReport { null_residual: 0.0, min_gradient: f64::INFINITY };
    for p in samples {
        let (mat, f, xi, _) = s.at(p)?;
        let nn = mat.inner(&xi, &xi).value().abs();
        let df = (0..s.dim()).map(|i| f.grad(i).abs()).fold(0.0, f64::max);
        if nn > NULL_TOL {
            return Err(Error::NotLightlikeFunction { point: p.clone(), residual: nn });
        }
        if df < NULL_TOL {
            return Err(Error::NotLightlikeFunction { point: p.clone(), residual: df });
        }
        report.null_residual = report.null_residual.max(nn);
        report.min_gradient = report.min_gradient.min(df);
    }
    Ok(report)
}

/// `N = (1/V(f)) {V − ½ g(V,V)/V(f) ∇f}` as jets.
fn n_jets(mat: &MetricAt, f: &Jet, xi: &[Jet], v: &[Jet]) -> Result<JetVec> {
    let vf = apply(v, f);
    if vf.value().abs() < PAIRING_TOL {
        return Err(Error::DegeneratePairing(mat.point.clone()));
    }
    let c = mat.inner(v, v) / (vf * 2.0);
    Ok(linalg::scale(vf.recip(), &linalg::sub(v, &linalg::scale(c, xi))))
}

pub fn build_n_levelset(s: &LightlikeFunctionScenario, p: &[f64]) -> Result<LevelsetN> {
    let (mat, f, xi, v) = s.at(p)?;
    let n = n_jets(&mat, &f, &xi, &v)?;
    Ok(LevelsetN {
        null_residual: mat.inner(&n, &n).value().abs(),
        nf_residual: (apply(&n, &f).value() - 1.0).abs(),
        n: linalg::vec_values(&n),
    })
}

/// `h(X,Y) = Π ∇_X Y` as a multiple of `N`, next to `Hess_f(X,Y)`.
pub fn second_fundamental_form(
    s: &LightlikeFunctionScenario,
    x: &VectorField,
    y: &VectorField,
    p: &[f64],
) -> Result<SecondFundamental> {
    let (mat, f, _, _) = s.at(p)?;
    let xj = x.eval_with(&mat.x)?;
    let yj = y.eval_with(&mat.x)?;
    second_fundamental_jets(&mat, &f, &xj, &yj)
}

fn second_fundamental_jets(mat: &MetricAt, f: &Jet, x: &[Jet], y: &[Jet]) -> Result<SecondFundamental> {
    for v in [x, y] {
        let t = apply(v, f).value().abs();
        if t > TANGENT_TOL {
            return Err(Error::NotTangent(t));
        }
    }
    // tr(TF) = RN and N(f) = 1, so the N coefficient of a class is its f-derivative
    let coefficient = apply(&mat.covariant(x, y), f).value();
    let h = mat.hessian_tensor(f);
    let mut hess = 0.0;
    for i in 0..x.len() {
        for j in 0..y.len() {
            hess += (h[i][j] * x[i] * y[j]).value();
        }
    }
    Ok(SecondFundamental { coefficient, hess })
}

/// Largest `|h|` coefficient and largest route disagreement over pairs of
/// the tangent frame `(ξ, X_a)`.
pub fn second_fundamental_on_frame(s: &LightlikeFunctionScenario, p: &[f64]) -> Result<(f64, f64)> {
    let (b, _) = s.bundle_at(p, None)?;
    let f = s.f.eval_with(&b.mat.x)?;
    let frame = b.leaf_frame();
    let (mut hmax, mut res) = (0.0f64, 0.0f64);
    for xa in &frame {
        for ya in &frame {
            let sf = second_fundamental_jets(&b.mat, &f, xa, ya)?;
            hmax = hmax.max(sf.coefficient.abs());
            res = res.max(sf.residual());
        }
    }
    Ok((hmax, res))
}

/// κ(N) by the level-set formula and by the bracket definition, with `V`
/// replaced by its component orthogonal to the screen.
pub fn kappa_n(s: &LightlikeFunctionScenario, p: &[f64]) -> Result<KappaN> {
    let (b, _) = s.bundle_at(p, None)?;
    let mat = &b.mat;
    let f = s.f.eval_with(&mat.x)?;
    let xi = &b.xi[0];
    let v = &b.v_proj[0];
    let n = &b.n[0];
    let v_f = apply(v, &f).value();
    if v_f.abs() < PAIRING_TOL {
        return Err(Error::DegeneratePairing(p.to_vec()));
    }
    let g_vv = mat.inner(v, v).value();
    let lie_xi = mat.lie_metric(xi);
    let lie_v = mat.lie_metric(v);
    let quad = |m: &[Vec<Jet>], a: &[Jet], c: &[Jet]| -> f64 {
        let mut acc = 0.0;
        for i in 0..a.len() {
            for j in 0..c.len() {
                acc += (m[i][j] * a[i] * c[j]).value();
            }
        }
        acc
    };
    let lie_xi_nn = quad(&lie_xi, n, n);
    let trace_lie_v: f64 = b.x.iter().zip(&b.eps_x).map(|(xa, e)| e * quad(&lie_v, xa, xa)).sum();
    let box_f = mat.laplace_beltrami(&f).value();
    let hess_xi_n = quad(&mat.hessian_tensor(&f), xi, n);
    let two_kappa = lie_xi_nn - (trace_lie_v - g_vv / v_f * (box_f - 2.0 * hess_xi_n)) / v_f;
    let definition = kappa(&b, &linalg::vec_values(n), KappaRoute::Definition);
    Ok(KappaN { lie_xi_nn, trace_lie_v, box_f, hess_xi_n, v_f, g_vv, formula: two_kappa / 2.0, definition })
}

/// Largest `|tra(Y) − Y(f) N|` over the given vectors.
pub fn sigma_residual(s: &LightlikeFunctionScenario, ys: &[Vec<f64>], p: &[f64]) -> Result<f64> {
    let (b, _) = s.bundle_at(p, None)?;
    let f = s.f.eval_with(&b.mat.x)?;
    let mut worst = 0.0f64;
    for y in ys {
        let yc = linalg::constant_vec(y);
        let expect = linalg::scale(apply(&yc, &f), &b.n[0]);
        worst = worst.max(linalg::norm_inf(&linalg::vec_values(&linalg::sub(&b.tra(&yc), &expect))));
    }
    Ok(worst)
}

/// Largest Killing residual of `∇f` over the samples.
pub fn gradient_killing_residual(s: &LightlikeFunctionScenario, samples: &[Vec<f64>]) -> Result<f64> {
    let mut worst = 0.0f64;
    for p in samples {
        let (mat, _, xi, _) = s.at(p)?;
        let l = linalg::values(&mat.lie_metric(&xi));
        worst = worst.max(libm::sqrt(l.iter().flatten().map(|v| v * v).sum::<f64>()));
    }
    Ok(worst)
}

/// Number of timelike screen vectors, compared with `s − 1`.
pub fn screen_index_check(s: &LightlikeFunctionScenario, p: &[f64]) -> Result<ScreenIndex> {
    let idx = check_signature(&s.metric, p)?;
    let (b, _) = s.bundle_at(p, None)?;
    let index = b.eps_x.iter().filter(|e| **e < 0.0).count();
    if index + 1 != idx {
        return Err(Error::IndexMismatch { expected: idx.saturating_sub(1), found: index });
    }
    let half_n = linalg::scale(Jet::constant(0.5), &b.n[0]);
    let plus = linalg::add(&b.xi[0], &half_n);
    let minus = linalg::sub(&b.xi[0], &half_n);
    let mut orthogonality = b.g(&plus, &minus).value().abs();
    for xa in &b.x {
        orthogonality = orthogonality.max(b.g(&plus, xa).value().abs()).max(b.g(&minus, xa).value().abs());
    }
    Ok(ScreenIndex { index, plus: b.g(&plus, &plus).value(), minus: b.g(&minus, &minus).value(), orthogonality })
}

fn lit(c: f64) -> Expr {
    Expr::Lit(c)
}

fn sum(terms: Vec<Expr>) -> Expr {
    terms.into_iter().reduce(|a, b| Expr::Bin(BinOp::Add, a.into(), b.into())).unwrap_or(Expr::Lit(0.0))
}

/// Flat `ℝⁿ_s` with its linear lightlike function, screen seed and complement.
pub fn flat_corollary_scenario(n: usize, s: usize) -> Result<LightlikeFunctionScenario> {
    if n < 3 || s < 1 || s + 1 > n || n > crate::jet::MAX_DIM {
        return Err(Error::InvalidSignature { n, s });
    }
    let c = libm::sqrt((n - s) as f64 / s as f64);
    let f = sum((0..n)
        .map(|i| {
            let x = Expr::Coord(i + 1);
            if i < s {
                Expr::Bin(BinOp::Mul, lit(c).into(), x.into())
            } else {
                x
            }
        })
        .collect());
    let e = |i: usize| -> Vec<f64> { (0..n).map(|k| if k == i { 1.0 } else { 0.0 }).collect() };
    let seed: Vec<VectorField> = (1..=n - 2)
        .map(|a| {
            let mut v = if a < s { e(a - 1) } else { e(a) };
            v[n - 1] = if a < s { -c } else { -1.0 };
            VectorField::constant(&v)
        })
        .collect();
    let v: Vec<f64> = (0..n).map(|i| if i + 1 < s { -c } else { 1.0 }).collect();
    let metric = MetricField::flat(n, s)?;
    let mut scn = LightlikeFunctionScenario::new(metric, f, VectorField::constant(&v));
    // the seed must be orthogonal to ∇f and independent
    let mat = MetricAt::new(&scn.metric, &vec![0.0; n])?;
    let fj = scn.f.eval_with(&mat.x)?;
    let xi = mat.gradient(&fj);
    let mut cols: Vec<JetVec> = seed.iter().map(|x| x.eval_with(&mat.x)).collect::<Result<Vec<_>>>()?;
    for x in &cols {
        if mat.inner(x, &xi).value().abs() > NULL_TOL {
            return Err(Error::Invalid("screen seed is not orthogonal to the gradient".to_string()));
        }
    }
    cols.push(xi);
    let vals: Vec<Vec<f64>> = cols.iter().map(|v| linalg::vec_values(v)).collect();
    if linalg::rank(&vals, 1e-10) != n - 1 {
        return Err(Error::Invalid("screen seed is degenerate".to_string()));
    }
    scn.screen_seed = Some(seed);
    Ok(scn)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_n3_s1() {
        let s = flat_corollary_scenario(3, 1).unwrap();
        assert_eq!(s.f.to_string(), "(((1.4142135623730951 * x1) + x2) + x3)");
        let n = build_n_levelset(&s, &[0.1, 0.2, 0.3]).unwrap();
        let expect = [1.0 / (2.0 * libm::sqrt(2.0)), 0.25, 0.25];
        for (a, b) in n.n.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn full_signature_rejected() {
        assert!(matches!(flat_corollary_scenario(3, 3), Err(Error::InvalidSignature { .. })));
    }
}
