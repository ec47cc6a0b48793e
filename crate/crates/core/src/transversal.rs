//! Lightlike transversal frames and the transversal bundle.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::foliation::Frames;
use crate::forms::{Convention, FormJet};
use crate::geometry::{bracket, pair, MetricAt};
use crate::jet::Jet;
use crate::linalg::{self, JetMat, JetVec};

/// Complement vectors with their screen components removed:
/// `V' = V − Σ ε_a g(V,X_a) X_a − Σ ε_α g(V,W_α) W_α`.
pub fn project_complement(
    g: &[Vec<Jet>],
    v: &[JetVec],
    x: &[JetVec],
    eps_x: &[f64],
    w: &[JetVec],
    eps_w: &[f64],
) -> Vec<JetVec> {
    v.iter()
        .map(|vk| {
            let mut out = vk.clone();
            for (s, e) in x.iter().zip(eps_x).chain(w.iter().zip(eps_w)) {
                let c = pair(g, vk, s) * *e;
                out = linalg::sub(&out, &linalg::scale(c, s));
            }
            out
        })
        .collect()
}

/// `N_i = A_ik ξ_k + B_ik V_k` with `B = G^{-T}`, `G_jk = g(ξ_j, V_k)` and
/// `A = −½ B S Bᵀ`, `S_kl = g(V_k, V_l)`. `v` must already be projected.
pub fn build_ltr(g: &[Vec<Jet>], xi: &[JetVec], v: &[JetVec], p: &[f64]) -> Result<Vec<JetVec>> {
    let r = xi.len();
    let n = g.len();
    if v.len() != r {
        return Err(Error::Invalid(alloc::format!("complement has {} fields, radical rank is {}", v.len(), r)));
    }
    let gt: JetMat = (0..r).map(|k| (0..r).map(|j| pair(g, &xi[j], &v[k])).collect()).collect();
    let (_, b) = linalg::inverse(&gt).ok_or_else(|| Error::SingularPairing(p.to_vec()))?;
    let s: JetMat = (0..r).map(|k| (0..r).map(|l| pair(g, &v[k], &v[l])).collect()).collect();
    let bsbt = linalg::matmul(&linalg::matmul(&b, &s), &linalg::transpose(&b));
    Ok((0..r)
        .map(|i| {
            let mut nv = vec![Jet::constant(0.0); n];
            for k in 0..r {
                let a = bsbt[i][k] * -0.5;
                for c in 0..n {
                    nv[c] += a * xi[k][c] + b[i][k] * v[k][c];
                }
            }
            nv
        })
        .collect())
}

/// Pointwise frames `{ξ_i, X_a, W_α, N_i}` with the complement they came from.
#[derive(Debug, Clone)]
pub struct FrameBundle {
    pub mat: MetricAt,
    pub tangent: Vec<JetVec>,
    pub xi: Vec<JetVec>,
    pub x: Vec<JetVec>,
    pub eps_x: Vec<f64>,
    pub w: Vec<JetVec>,
    pub eps_w: Vec<f64>,
    pub v: Vec<JetVec>,
    pub v_proj: Vec<JetVec>,
    pub n: Vec<JetVec>,
    pub convention: Convention,
}

/// Pieces of a vector in `T(F) ⊕ ltr(TF) ⊕ S(TF^⊥)`.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub tan: JetVec,
    pub tra: JetVec,
    pub ltr: JetVec,
    pub screen_perp: JetVec,
}

/// The one-forms dual to a frame bundle, as covector components.
#[derive(Debug, Clone)]
pub struct DualForms {
    pub lambda: Vec<FormJet>,
    pub mu: Vec<FormJet>,
    pub omega: Vec<FormJet>,
    pub eta: Vec<FormJet>,
}

impl FrameBundle {
    pub fn assemble(mat: MetricAt, frames: Frames, complement: Vec<JetVec>, convention: Convention) -> Result<FrameBundle> {
        let v_proj = project_complement(&mat.g, &complement, &frames.screen_tan, &frames.eps_tan, &frames.screen_perp, &frames.eps_perp);
        let n = build_ltr(&mat.g, &frames.radical, &v_proj, &mat.point)?;
        let bundle = FrameBundle {
            tangent: frames.tangent,
            xi: frames.radical,
            x: frames.screen_tan,
            eps_x: frames.eps_tan,
            w: frames.screen_perp,
            eps_w: frames.eps_perp,
            v: complement,
            v_proj,
            n,
            mat,
            convention,
        };
        bundle.check_spans()?;
        Ok(bundle)
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }
    pub fn r(&self) -> usize {
        self.xi.len()
    }
    pub fn m(&self) -> usize {
        self.xi.len() + self.x.len()
    }
    pub fn q(&self) -> usize {
        self.xi.len() + self.w.len()
    }
    pub fn point(&self) -> &[f64] {
        &self.mat.point
    }

    pub fn g(&self, u: &[Jet], v: &[Jet]) -> Jet {
        pair(&self.mat.g, u, v)
    }

    /// Full adapted frame `(ξ, X, W, N)`.
    pub fn full_frame(&self) -> Vec<JetVec> {
        self.xi.iter().chain(&self.x).chain(&self.w).chain(&self.n).cloned().collect()
    }

    /// Tangent frame `(ξ, X)` in the order used by `χ_F`.
    pub fn leaf_frame(&self) -> Vec<JetVec> {
        self.xi.iter().chain(&self.x).cloned().collect()
    }

    /// Transversal frame `(N, W)` in the order used by `ν_F`.
    pub fn tr_frame(&self) -> Vec<JetVec> {
        self.n.iter().chain(&self.w).cloned().collect()
    }

    fn check_spans(&self) -> Result<()> {
        let f = self.full_frame();
        if f.len() != self.dim() {
            return Err(Error::IncompleteFrame(self.point().to_vec()));
        }
        let cols: JetMat = f.iter().map(|v| v.iter().map(|c| Jet::constant(c.value())).collect()).collect();
        let scale = linalg::max_abs_value(&cols);
        let d = linalg::det(&cols).value();
        if linalg::is_singular(d, scale, self.dim()) {
            return Err(Error::IncompleteFrame(self.point().to_vec()));
        }
        Ok(())
    }

    pub fn dual_forms(&self) -> DualForms {
        let low = |vs: &[JetVec]| vs.iter().map(|v| FormJet::one_form(&self.mat.lower(v))).collect();
        DualForms { lambda: low(&self.n), mu: low(&self.xi), omega: low(&self.x), eta: low(&self.w) }
    }

    /// `tan(v) = λ^i(v) ξ_i + ε_a ω^a(v) X_a`.
    pub fn tan(&self, v: &[Jet]) -> JetVec {
        let mut out = vec![Jet::constant(0.0); self.dim()];
        for (xi, ni) in self.xi.iter().zip(&self.n) {
            out = linalg::add(&out, &linalg::scale(self.g(v, ni), xi));
        }
        for (xa, e) in self.x.iter().zip(&self.eps_x) {
            out = linalg::add(&out, &linalg::scale(self.g(v, xa) * *e, xa));
        }
        out
    }

    /// `ltr(v) = μ^i(v) N_i`.
    pub fn ltr(&self, v: &[Jet]) -> JetVec {
        let mut out = vec![Jet::constant(0.0); self.dim()];
        for (xi, ni) in self.xi.iter().zip(&self.n) {
            out = linalg::add(&out, &linalg::scale(self.g(v, xi), ni));
        }
        out
    }

    /// `ε_α η^α(v) W_α`.
    pub fn screen_perp_part(&self, v: &[Jet]) -> JetVec {
        let mut out = vec![Jet::constant(0.0); self.dim()];
        for (w, e) in self.w.iter().zip(&self.eps_w) {
            out = linalg::add(&out, &linalg::scale(self.g(v, w) * *e, w));
        }
        out
    }

    pub fn tra(&self, v: &[Jet]) -> JetVec {
        linalg::add(&self.ltr(v), &self.screen_perp_part(v))
    }

    pub fn decompose(&self, v: &[Jet]) -> Decomposition {
        let tan = self.tan(v);
        let tra = linalg::sub(v, &tan);
        Decomposition { tan, tra, ltr: self.ltr(v), screen_perp: self.screen_perp_part(v) }
    }

    /// Coefficients of `tra(v)` in the class basis `(W, N)`.
    pub fn class_coords(&self, v: &[Jet]) -> Vec<f64> {
        let w = self.w.iter().zip(&self.eps_w).map(|(w, e)| (self.g(v, w) * *e).value());
        let n = self.xi.iter().map(|xi| self.g(v, xi).value());
        w.chain(n).collect()
    }

    /// Constant-coefficient extension of `tra(z)` in the `(N, W)` frame.
    pub fn tr_extension(&self, z: &[f64]) -> JetVec {
        let zc = linalg::constant_vec(z);
        let mut out = vec![Jet::constant(0.0); self.dim()];
        for (xi, ni) in self.xi.iter().zip(&self.n) {
            let c = Jet::constant(self.g(&zc, xi).value());
            out = linalg::add(&out, &linalg::scale(c, ni));
        }
        for (w, e) in self.w.iter().zip(&self.eps_w) {
            let c = Jet::constant(self.g(&zc, w).value() * e);
            out = linalg::add(&out, &linalg::scale(c, w));
        }
        out
    }

    pub fn g_tra(&self, s: &[Jet], r: &[Jet]) -> f64 {
        self.g(&self.tra(s), &self.tra(r)).value()
    }

    /// Largest deviation from `g(N_i,ξ_j) = δ_ij`, `g(N_i,N_j) = 0`,
    /// `g(N_i,W_α) = 0`, `g(N_i,X_a) = 0`.
    pub fn ltr_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, ni) in self.n.iter().enumerate() {
            for (j, xj) in self.xi.iter().enumerate() {
                let d = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((self.g(ni, xj).value() - d).abs());
            }
            for other in self.n.iter().chain(&self.w).chain(&self.x) {
                worst = worst.max(self.g(ni, other).value().abs());
            }
        }
        worst
    }

    /// Both inclusions of `σ(Rad Q) = ltr(TF)` as one residual.
    pub fn rad_q_residual(&self) -> f64 {
        let tr = self.tr_frame();
        let q = tr.len();
        let r = self.r();
        let gm: Vec<Vec<f64>> = tr.iter().map(|a| tr.iter().map(|b| self.g_tra(a, b)).collect()).collect();
        let mut worst = 0.0f64;
        for i in 0..r {
            for j in 0..q {
                worst = worst.max(gm[i][j].abs());
            }
        }
        let (ev, vecs) = linalg::sym_eigen(&gm);
        let top = linalg::norm_inf(&ev).max(1.0);
        let null: Vec<usize> = (0..q).filter(|&k| ev[k].abs() <= 1e-8 * top).collect();
        if null.len() != r {
            return worst.max(1.0);
        }
        for &k in &null {
            // W coefficients of a null class must vanish
            for row in r..q {
                worst = worst.max(vecs[row][k].abs());
            }
        }
        worst
    }

    /// `∇_X s` for a field `Y` representing `s`, as `(W, N)` coordinates.
    ///
    /// Tangent directions use `Π[X_tan, Y]`, transversal ones
    /// `tra(∇^g_{X_tra} tra Y)`.
    pub fn nabla_q(&self, x: &[Jet], y: &[Jet]) -> Vec<f64> {
        let xt = self.tan(x);
        let xr = linalg::sub(x, &xt);
        let bott = bracket(&xt, y);
        let lc = self.mat.covariant(&xr, &self.tra(y));
        self.class_coords(&linalg::add(&bott, &lc))
    }

    /// `T(Y,Z) = ∇_Y πZ − ∇_Z πY − π[Y,Z]` in `(W, N)` coordinates.
    pub fn torsion(&self, y: &[Jet], z: &[Jet]) -> Vec<f64> {
        let a = self.nabla_q(y, z);
        let b = self.nabla_q(z, y);
        let c = self.class_coords(&bracket(y, z));
        a.iter().zip(&b).zip(&c).map(|((a, b), c)| a - b - c).collect()
    }

    /// `(F^{-T}, C)` with `N'_i = Σ (F^{-T})_ik N_k + Σ C_ik ξ_k`.
    pub fn ltr_transform_coeffs(&self, f: &[JetVec], a: &[JetVec], b: &[JetVec]) -> Result<(JetMat, JetMat)> {
        let r = self.r();
        let p = self.point();
        let gm: JetMat = (0..r).map(|j| (0..r).map(|k| self.g(&self.xi[j], &self.v_proj[k])).collect()).collect();
        let g2 = linalg::matmul(&linalg::matmul(f, &gm), &linalg::transpose(b));
        let (_, g2inv) = linalg::inverse(&g2).ok_or_else(|| Error::SingularPairing(p.to_vec()))?;
        let (_, finv) = linalg::inverse(f).ok_or_else(|| Error::SingularPairing(p.to_vec()))?;
        let finv_t = linalg::transpose(&finv);
        let left = linalg::matmul(&linalg::transpose(&g2inv), a);
        let right = linalg::matmul(&linalg::matmul(&linalg::matmul(&finv_t, &linalg::transpose(a)), &g2inv), f);
        let c = (0..r).map(|i| (0..r).map(|k| (left[i][k] - right[i][k]) * 0.5).collect()).collect();
        Ok((finv_t, c))
    }

    /// New transversal frame for `ξ' = Fξ`, `V' = aξ + bV`: closed form and
    /// a rebuild from scratch.
    pub fn transform_ltr(&self, f: &[JetVec], a: &[JetVec], b: &[JetVec]) -> Result<(Vec<JetVec>, Vec<JetVec>)> {
        let r = self.r();
        let n = self.dim();
        let p = self.point();
        let xi2: Vec<JetVec> = (0..r).map(|i| linalg::combine(&f[i], &self.xi, n)).collect();
        let v2: Vec<JetVec> =
            (0..r).map(|i| linalg::add(&linalg::combine(&a[i], &self.xi, n), &linalg::combine(&b[i], &self.v, n))).collect();
        let v2p = project_complement(&self.mat.g, &v2, &self.x, &self.eps_x, &self.w, &self.eps_w);
        let rebuilt = build_ltr(&self.mat.g, &xi2, &v2p, p)?;

        let (finv_t, c) = self.ltr_transform_coeffs(f, a, b)?;
        let closed: Vec<JetVec> = (0..r)
            .map(|i| linalg::add(&linalg::combine(&finv_t[i], &self.n, n), &linalg::combine(&c[i], &self.xi, n)))
            .collect();
        Ok((closed, rebuilt))
    }
}
