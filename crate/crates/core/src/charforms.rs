//! Characteristic forms, the κ one-form and the identities built on them.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::forms::{contraction_residual, filtration_degree, wedge_all, Convention, FormJet};
use crate::geometry::{apply, bracket};
use crate::jet::Jet;
use crate::linalg::{self, JetMat, JetVec};
use crate::transversal::{build_ltr, project_complement, FrameBundle};

/// Tolerance on the tangent part of a vector declared transversal.
pub const TRANSVERSAL_TOL: f64 = 1e-9;
/// Tolerance on the transversal part of `[X, Y]` for an automorphism `Y`.
pub const AUTOMORPHISM_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KappaRoute {
    Definition,
    MeanCurvature,
}

/// `χ_F = λ^1 ∧ … ∧ λ^r ∧ θ^1 ∧ … ∧ θ^{m−r}` with `θ^a = ε_a ω^a`.
pub fn chi_form(b: &FrameBundle) -> Result<FormJet> {
    let d = b.dual_forms();
    let mut ones = d.lambda;
    for (w, e) in d.omega.iter().zip(&b.eps_x) {
        ones.push(w.scale(Jet::constant(*e)));
    }
    wedge_all(&ones, b.dim(), b.convention)
}

/// `ν_F = μ^1 ∧ … ∧ μ^r ∧ ε_1 η^1 ∧ …`.
pub fn nu_form(b: &FrameBundle) -> Result<FormJet> {
    let d = b.dual_forms();
    let mut ones = d.mu;
    for (w, e) in d.eta.iter().zip(&b.eps_w) {
        ones.push(w.scale(Jet::constant(*e)));
    }
    wedge_all(&ones, b.dim(), b.convention)
}

pub fn chi_eval(b: &FrameBundle, vs: &[JetVec]) -> Result<f64> {
    if vs.len() != b.m() {
        return Err(Error::IncompleteFrame(b.point().to_vec()));
    }
    Ok(chi_form(b)?.eval(vs).value())
}

pub fn nu_eval(b: &FrameBundle, vs: &[JetVec]) -> Result<f64> {
    if vs.len() != b.q() {
        return Err(Error::IncompleteFrame(b.point().to_vec()));
    }
    Ok(nu_form(b)?.eval(vs).value())
}

/// Shared first term `Σ_i λ^i([Z, ξ_i])`.
fn radical_term(b: &FrameBundle, z: &[Jet]) -> Jet {
    b.xi.iter().zip(&b.n).map(|(xi, ni)| b.g(&bracket(z, xi), ni)).sum()
}

/// κ on a transversal field `Z` given as jets.
pub fn kappa_on_field(b: &FrameBundle, z: &[Jet], route: KappaRoute) -> Jet {
    let mut k = radical_term(b, z);
    for (xa, e) in b.x.iter().zip(&b.eps_x) {
        k += *e
            * match route {
                KappaRoute::Definition => b.g(&bracket(z, xa), xa),
                KappaRoute::MeanCurvature => b.g(z, &b.mat.covariant(xa, xa)),
            };
    }
    k
}

/// `κ(z)`: zero on `T(F)`, evaluated on the constant-coefficient extension
/// of `tra(z)` otherwise.
pub fn kappa(b: &FrameBundle, z: &[f64], route: KappaRoute) -> f64 {
    kappa_on_field(b, &b.tr_extension(z), route).value()
}

/// κ as a one-form, components `κ(∂_i)` (values only).
pub fn kappa_form(b: &FrameBundle, offset: f64) -> FormJet {
    let n = b.dim();
    let comps: Vec<Jet> = (0..n)
        .map(|i| {
            let e: Vec<f64> = (0..n).map(|k| if k == i { 1.0 } else { 0.0 }).collect();
            Jet::constant(kappa(b, &e, KappaRoute::Definition) + offset * tr_weight(b, &e))
        })
        .collect();
    FormJet::one_form(&comps)
}

// linear functional used to inject a fault into κ without breaking T(F) ⌋ κ = 0
fn tr_weight(b: &FrameBundle, e: &[f64]) -> f64 {
    let ec = linalg::constant_vec(e);
    match (b.xi.first(), b.w.first()) {
        (Some(xi), _) => b.g(&ec, xi).value(),
        (None, Some(w)) => b.g(&ec, w).value(),
        _ => 0.0,
    }
}

/// `H = Σ_a ε_a (∇_{X_a} X_a)^{S(TF)^⊥}`.
pub fn mean_curvature(b: &FrameBundle) -> JetVec {
    let n = b.dim();
    let mut h = vec![Jet::constant(0.0); n];
    for (xa, e) in b.x.iter().zip(&b.eps_x) {
        let mut v = b.mat.covariant(xa, xa);
        for (xb, eb) in b.x.iter().zip(&b.eps_x) {
            let c = b.g(&v, xb) * *eb;
            v = linalg::sub(&v, &linalg::scale(c, xb));
        }
        h = linalg::add(&h, &linalg::scale(Jet::constant(*e), &v));
    }
    h
}

fn check_transversal(b: &FrameBundle, z: &[f64]) -> Result<()> {
    let t = linalg::vec_values(&b.tan(&linalg::constant_vec(z)));
    let res = linalg::norm_inf(&t);
    if res > TRANSVERSAL_TOL * linalg::norm_inf(z).max(1.0) {
        return Err(Error::NotTransversal(res));
    }
    Ok(())
}

/// `|(L_Z χ)(Y) + κ(Z) χ(Y)|` on the canonical tangent tuple, with `κ`
/// shifted by `kappa_offset`.
pub fn rummler_residual(b: &FrameBundle, z: &[f64], kappa_offset: f64) -> Result<f64> {
    check_transversal(b, z)?;
    let zf = b.tr_extension(z);
    let chi = chi_form(b)?;
    let ys = b.leaf_frame();
    let mut lie = apply(&zf, &chi.eval(&ys));
    for j in 0..ys.len() {
        let mut args = ys.clone();
        args[j] = bracket(&zf, &ys[j]);
        lie -= chi.eval(&args);
    }
    let k = kappa_on_field(b, &zf, KappaRoute::Definition).value() + kappa_offset;
    Ok((lie.value() + k * chi.eval(&ys).value()).abs())
}

/// Largest Rummler residual over the transversal frame `(N, W)`.
pub fn rummler_max(b: &FrameBundle, kappa_offset: f64) -> Result<f64> {
    let mut worst = 0.0f64;
    for t in b.tr_frame() {
        let z = linalg::vec_values(&t);
        worst = worst.max(rummler_residual(b, &z, kappa_offset)?);
    }
    Ok(worst)
}

/// `dχ + c κ ∧ χ` with `c = m + 1` under factorial alternation and `1` under
/// unit shuffle.
pub fn rummler_defect(b: &FrameBundle, kappa_offset: f64) -> Result<FormJet> {
    let chi = chi_form(b)?;
    let c = match b.convention {
        Convention::UnitShuffle => 1.0,
        Convention::FactorialAlternation => (b.m() + 1) as f64,
    };
    let kw = kappa_form(b, kappa_offset).wedge(&chi, b.convention)?;
    Ok(chi.d()?.add(&kw.scale(Jet::constant(c))))
}

/// Filtration degree of the Rummler defect and its `m`-fold contraction
/// residual. Needs factorial alternation.
pub fn rummler_filtration(b: &FrameBundle, tol: f64, kappa_offset: f64) -> Result<(usize, f64)> {
    if b.convention != Convention::FactorialAlternation {
        return Err(Error::ConventionMismatch);
    }
    let phi = rummler_defect(b, kappa_offset)?;
    let frame = b.leaf_frame();
    Ok((filtration_degree(&phi, &frame, tol), contraction_residual(&phi, &frame, b.m())))
}

/// Largest transversal part of `[E, Y]` over the tangent frame.
pub fn automorphism_residual(b: &FrameBundle, y: &[Jet]) -> f64 {
    let mut worst = 0.0f64;
    for e in b.tangent.iter().chain(&b.xi).chain(&b.x) {
        let t = b.tra(&bracket(e, y));
        worst = worst.max(linalg::norm_inf(&linalg::vec_values(&t)));
    }
    worst
}

/// Transversal divergence and the spread against a shifted transversal tuple.
pub fn div_b(b: &FrameBundle, y: &[Jet]) -> Result<(f64, f64)> {
    let res = automorphism_residual(b, y);
    if res > AUTOMORPHISM_TOL {
        return Err(Error::NotAutomorphism(res));
    }
    let nu = nu_form(b)?;
    let eval = |ts: &[JetVec]| -> f64 {
        let mut lie = apply(y, &nu.eval(ts));
        for j in 0..ts.len() {
            let mut args = ts.to_vec();
            args[j] = bracket(y, &ts[j]);
            lie -= nu.eval(&args);
        }
        lie.value() / nu.eval(ts).value()
    };
    let tr = b.tr_frame();
    let div = eval(&tr);
    let leaf = b.leaf_frame();
    let shifted: Vec<JetVec> = tr.iter().enumerate().map(|(j, t)| linalg::add(t, &leaf[j % leaf.len()])).collect();
    Ok((div, (eval(&shifted) - div).abs()))
}

/// Largest `|div_B E|` over the tangent frame.
pub fn tangent_divergence(b: &FrameBundle) -> Result<f64> {
    let mut worst = 0.0f64;
    for e in b.leaf_frame() {
        worst = worst.max(div_b(b, &e)?.0.abs());
    }
    Ok(worst)
}

/// Terms of the transversal divergence identity on the adapted frame
/// `(N, W, ξ, X)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceTerms {
    /// `div_B(Y) ω`
    pub lhs: f64,
    /// `d((i_Y ν) ∧ χ)`
    pub exact: f64,
    /// `κ(Y) ω`
    pub kappa: f64,
    /// `dν ∧ i_Y χ`
    pub tangent: f64,
    /// coefficients `(c1, c2)` with `lhs = c1·exact + c2·kappa` under the
    /// active convention
    pub coeffs: (f64, f64),
    pub q: usize,
    pub m: usize,
}

impl DivergenceTerms {
    /// Residual with the derived coefficients; `flip` negates the κ term.
    pub fn residual(&self, flip: bool) -> f64 {
        let c2 = if flip { -self.coeffs.1 } else { self.coeffs.1 };
        (self.lhs - self.coeffs.0 * self.exact - c2 * self.kappa).abs()
    }

    /// Residual of `lhs = exact + (−1)^q (m+1) κ ω`.
    pub fn literal_residual(&self) -> f64 {
        let s = if self.q.is_multiple_of(2) { 1.0 } else { -1.0 };
        (self.lhs - self.exact - s * (self.m + 1) as f64 * self.kappa).abs()
    }
}

pub fn divergence_terms(b: &FrameBundle, y: &[Jet]) -> Result<DivergenceTerms> {
    let (div, _) = div_b(b, y)?;
    let conv = b.convention;
    let nu = nu_form(b)?;
    let chi = chi_form(b)?;
    let omega = nu.wedge(&chi, conv)?;
    let frame: Vec<JetVec> = b.tr_frame().into_iter().chain(b.leaf_frame()).collect();
    let w = omega.eval(&frame).value();
    let exact = nu.interior(y)?.wedge(&chi, conv)?.d()?.eval(&frame).value();
    let yv = linalg::vec_values(y);
    let k = kappa(b, &yv, KappaRoute::Definition);
    let tangent = if b.m() > 0 { nu.d()?.wedge(&chi.interior(y)?, conv)?.eval(&frame).value() } else { 0.0 };
    let (n, q) = (b.dim() as f64, b.q() as f64);
    let coeffs = match conv {
        Convention::UnitShuffle => (1.0, 1.0),
        Convention::FactorialAlternation => (q / n, 1.0),
    };
    Ok(DivergenceTerms { lhs: div * w, exact, kappa: k * w, tangent, coeffs, q: b.q(), m: b.m() })
}

/// Residual of the divergence identity; needs factorial alternation.
pub fn divergence_identity_residual(b: &FrameBundle, y: &[Jet], flip: bool) -> Result<f64> {
    if b.convention != Convention::FactorialAlternation {
        return Err(Error::ConventionMismatch);
    }
    Ok(divergence_terms(b, y)?.residual(flip))
}

/// `g(Z, H) − g_tra(Z, τ) − Σ ε_a g(ltr Z, ∇_{X_a} X_a)`.
pub fn tau_screen_residual(b: &FrameBundle, z: &[f64]) -> f64 {
    let zf = b.tr_extension(z);
    let lhs = b.g(&zf, &mean_curvature(b)).value();
    let mut tau = vec![Jet::constant(0.0); b.dim()];
    let mut second = 0.0;
    let ltr = b.ltr(&zf);
    for (xa, e) in b.x.iter().zip(&b.eps_x) {
        let cov = b.mat.covariant(xa, xa);
        tau = linalg::add(&tau, &linalg::scale(Jet::constant(*e), &b.tra(&cov)));
        second += e * b.g(&ltr, &cov).value();
    }
    (lhs - b.g_tra(&zf, &tau) - second).abs()
}

/// Bundle for `ξ' = Fξ` and complement `V' = aξ + bV`, screens unchanged.
pub fn transformed_bundle(b: &FrameBundle, f: &[JetVec], a: &[JetVec], bm: &[JetVec]) -> Result<FrameBundle> {
    let r = b.r();
    let n = b.dim();
    let xi: Vec<JetVec> = (0..r).map(|i| linalg::combine(&f[i], &b.xi, n)).collect();
    let v: Vec<JetVec> =
        (0..r).map(|i| linalg::add(&linalg::combine(&a[i], &b.xi, n), &linalg::combine(&bm[i], &b.v, n))).collect();
    let v_proj = project_complement(&b.mat.g, &v, &b.x, &b.eps_x, &b.w, &b.eps_w);
    let nn = build_ltr(&b.mat.g, &xi, &v_proj, b.point())?;
    let mut out = b.clone();
    out.xi = xi;
    out.v = v;
    out.v_proj = v_proj;
    out.n = nn;
    Ok(out)
}

/// `(κ(ξ',E')(z), κ(ξ,E)(z) + tr(F⁻¹ dF)(z))`.
pub fn kappa_gauge(b: &FrameBundle, f: &[JetVec], a: &[JetVec], bm: &[JetVec], z: &[f64]) -> Result<(f64, f64)> {
    let b2 = transformed_bundle(b, f, a, bm)?;
    let lhs = kappa(&b2, z, KappaRoute::Definition);
    let fm: JetMat = f.to_vec();
    let (_, finv) = linalg::inverse(&fm).ok_or_else(|| Error::SingularPairing(b.point().to_vec()))?;
    let zc = linalg::constant_vec(z);
    let r = b.r();
    let mut tr = 0.0;
    for i in 0..r {
        for j in 0..r {
            tr += finv[i][j].value() * apply(&zc, &fm[j][i]).value();
        }
    }
    Ok((lhs, kappa(b, z, KappaRoute::Definition) + tr))
}

/// Terms separating `κ(ξ',E')(z)` from `κ(ξ,E)(z) + tr(F⁻¹dF)(z)` when `N'`
/// acquires radical components `N'_i = F^{-T}N + C_ik ξ_k`: with `Z'` the
/// extension of `z` in the new bundle and `ψ^k = g(z,ξ'_i) C_ik`,
/// `Σ F_jk C_ji g([Z',ξ_k],ξ_i) + ψ^k K(ξ_k) − ξ_k(ψ^k) + tr(F⁻¹dF)(tra' z − z)`
/// where `K` is the bracket formula of κ applied to a tangent field.
pub fn kappa_gauge_defect(b: &FrameBundle, f: &[JetVec], a: &[JetVec], bm: &[JetVec], z: &[f64]) -> Result<f64> {
    let b2 = transformed_bundle(b, f, a, bm)?;
    let zf = b2.tr_extension(z);
    let (_, c) = b.ltr_transform_coeffs(f, a, bm)?;
    let r = b.r();
    let zc = linalg::constant_vec(z);
    let mut acc = 0.0;
    for j in 0..r {
        for k in 0..r {
            let br = bracket(&zf, &b.xi[k]);
            for i in 0..r {
                acc += (f[j][k] * c[j][i] * b.g(&br, &b.xi[i])).value();
            }
        }
    }
    let alpha: Vec<f64> = b2.xi.iter().map(|x| b.g(&zc, x).value()).collect();
    for k in 0..r {
        let psi: Jet = (0..r).map(|i| c[i][k] * alpha[i]).sum();
        acc += psi.value() * kappa_on_field(b, &b.xi[k], KappaRoute::Definition).value();
        acc -= apply(&b.xi[k], &psi).value();
    }
    let shift = linalg::sub(&linalg::constant_vec(&linalg::vec_values(&b2.tra(&zc))), &zc);
    let (_, finv) = linalg::inverse(f).ok_or_else(|| Error::SingularPairing(b.point().to_vec()))?;
    for i in 0..r {
        for j in 0..r {
            acc += finv[i][j].value() * apply(&shift, &f[j][i]).value();
        }
    }
    Ok(acc)
}
