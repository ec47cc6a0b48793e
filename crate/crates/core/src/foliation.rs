//! Tangent, orthogonal, radical and screen frames of a foliation.
//!
//! Frames are jet vectors at the sample point, so their brackets are
//! available downstream. Pivot choices and screen recipes are fixed by a
//! [`FoliationPlan`] built at the first sample and replayed everywhere else.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::geometry::{pair, MetricAt, VectorField};
use crate::jet::Jet;
use crate::linalg::{self, JetMat, JetVec};

/// Relative threshold below which Gram eigenvalues count as zero.
pub const RANK_TOL: f64 = 1e-8;
/// Smallest accepted screen self-product.
pub const SCREEN_PIVOT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub enum FoliationSpec {
    /// Leaves are common level sets of `funcs`. `pivots` are 0-based columns
    /// of the Jacobian solved for; `None` picks them at the first sample.
    LevelFunctions { funcs: Vec<Expr>, pivots: Option<Vec<usize>> },
    /// Leaves are integral manifolds of the given frame.
    ExplicitFrame { fields: Vec<VectorField> },
}

impl FoliationSpec {
    pub fn codim(&self, n: usize) -> usize {
        match self {
            FoliationSpec::LevelFunctions { funcs, .. } => funcs.len(),
            FoliationSpec::ExplicitFrame { fields } => n - fields.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub enum RadicalChoice {
    /// Nullspace of the tangent Gram matrix with fixed pivoting.
    #[default]
    Auto,
    /// Gradient of the level function with this index.
    Gradient(usize),
    Fields(Vec<VectorField>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Foliation {
    pub spec: FoliationSpec,
    pub radical: RadicalChoice,
    pub screen_tan_seed: Option<Vec<VectorField>>,
    pub screen_perp_seed: Option<Vec<VectorField>>,
}

impl Foliation {
    pub fn new(spec: FoliationSpec) -> Foliation {
        Foliation { spec, radical: RadicalChoice::Auto, screen_tan_seed: None, screen_perp_seed: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    RLightlike,
    CoIsotropic,
    Isotropic,
    TotallyLightlike,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::RLightlike => "r-lightlike",
            Kind::CoIsotropic => "co-isotropic",
            Kind::Isotropic => "isotropic",
            Kind::TotallyLightlike => "totally lightlike",
        }
    }
}

pub fn classify(m: usize, q: usize, r: usize) -> Result<Kind> {
    if r == 0 || r > m.min(q) {
        return Err(Error::InvalidRank { m, q, r });
    }
    Ok(if r < m.min(q) {
        Kind::RLightlike
    } else if r == q && q < m {
        Kind::CoIsotropic
    } else if r == m && m < q {
        Kind::Isotropic
    } else {
        Kind::TotallyLightlike
    })
}

/// Screen construction recipe: each accepted vector is the sum of the listed
/// candidates, orthogonalized against the earlier ones.
#[derive(Debug, Clone, PartialEq)]
pub struct ScreenPlan {
    pub recipes: Vec<Vec<usize>>,
    pub eps: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadicalPlan {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub free: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoliationPlan {
    pub n: usize,
    pub m: usize,
    pub q: usize,
    pub r: usize,
    pub level_pivots: Option<Vec<usize>>,
    pub perp_pivots: Option<Vec<usize>>,
    pub radical: Option<RadicalPlan>,
    pub screen_tan: ScreenPlan,
    pub screen_perp: ScreenPlan,
}

/// All foliation frames at one point.
#[derive(Debug, Clone)]
pub struct Frames {
    pub tangent: Vec<JetVec>,
    pub perp: Vec<JetVec>,
    pub radical: Vec<JetVec>,
    pub screen_tan: Vec<JetVec>,
    pub eps_tan: Vec<f64>,
    pub screen_perp: Vec<JetVec>,
    pub eps_perp: Vec<f64>,
}

fn unit(j: usize, n: usize) -> JetVec {
    (0..n).map(|k| Jet::constant(if k == j { 1.0 } else { 0.0 })).collect()
}

/// Kernel of a `rows × n` jet matrix of full row rank, solved for the pivot
/// columns: one vector `e_j − Σ_p (A_P⁻¹ A_j)_p e_p` per non-pivot `j`.
pub fn kernel_frame(a: &[JetVec], pivots: &[usize], p: &[f64]) -> Result<Vec<JetVec>> {
    let n = a.first().map_or(0, |r| r.len());
    let ap: JetMat = a.iter().map(|row| pivots.iter().map(|&c| row[c]).collect()).collect();
    let free: Vec<usize> = (0..n).filter(|j| !pivots.contains(j)).collect();
    let aj: JetMat = a.iter().map(|row| free.iter().map(|&c| row[c]).collect()).collect();
    let (_, x) = linalg::solve(&ap, &aj).ok_or_else(|| Error::RankDrop(p.to_vec()))?;
    Ok(free
        .iter()
        .enumerate()
        .map(|(col, &j)| {
            let mut v = unit(j, n);
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] -= x[row][col];
            }
            v
        })
        .collect())
}

fn auto_pivots(a: &[JetVec]) -> Vec<usize> {
    let vals: Vec<Vec<f64>> = a.iter().map(|r| linalg::vec_values(r)).collect();
    linalg::pivot_sets(&vals, a.len()).1
}

/// Gram matrix `g(E_a, E_b)`.
pub fn gram(g: &[Vec<Jet>], frame: &[JetVec]) -> JetMat {
    frame.iter().map(|a| frame.iter().map(|b| pair(g, a, b)).collect()).collect()
}

/// Size of `g(E_a, E_b)` for a frame: `max|g_ij| · n · max|E_a|²`.
pub fn gram_scale(g: &[Vec<Jet>], frame: &[JetVec]) -> f64 {
    let e = frame.iter().map(|v| linalg::norm_inf(&linalg::vec_values(v))).fold(0.0, f64::max);
    linalg::max_abs_value(g) * g.len() as f64 * e * e
}

/// Nullity of a Gram matrix: eigenvalues up to `RANK_TOL · scale` count as zero.
pub fn gram_nullity(gm: &[Vec<Jet>], scale: f64) -> usize {
    if gm.is_empty() {
        return 0;
    }
    let (ev, _) = linalg::sym_eigen(&linalg::values(gm));
    ev.iter().filter(|e| e.abs() <= RANK_TOL * scale).count()
}

/// Radical of a tangent frame: nullspace of its Gram matrix with pivots
/// fixed by `plan` (chosen here when `plan` is `None`).
pub fn radical_frame(
    g: &[Vec<Jet>],
    tangent: &[JetVec],
    plan: Option<&RadicalPlan>,
    p: &[f64],
) -> Result<(Vec<JetVec>, RadicalPlan)> {
    let m = tangent.len();
    let n = g.len();
    let gm = gram(g, tangent);
    let r = gram_nullity(&gm, gram_scale(g, tangent));
    let plan = match plan {
        Some(pl) => {
            if pl.free.len() != r {
                return Err(Error::NonConstantRank { expected: pl.free.len(), found: r, point: p.to_vec() });
            }
            pl.clone()
        }
        None => {
            if r == 0 {
                return Err(Error::NotLightlike(p.to_vec()));
            }
            let (rows, cols) = linalg::pivot_sets(&linalg::values(&gm), m - r);
            let free = (0..m).filter(|c| !cols.contains(c)).collect();
            RadicalPlan { rows, cols, free }
        }
    };
    let coeffs: Vec<JetVec> = if plan.cols.is_empty() {
        plan.free.iter().map(|&f| unit(f, m)).collect()
    } else {
        let a: JetMat = plan.rows.iter().map(|&i| plan.cols.iter().map(|&c| gm[i][c]).collect()).collect();
        let b: JetMat = plan.rows.iter().map(|&i| plan.free.iter().map(|&f| gm[i][f]).collect()).collect();
        let (_, x) = linalg::solve(&a, &b).ok_or_else(|| Error::RankDrop(p.to_vec()))?;
        plan.free
            .iter()
            .enumerate()
            .map(|(k, &f)| {
                let mut c = unit(f, m);
                for (row, &col) in plan.cols.iter().enumerate() {
                    c[col] = -x[row][k];
                }
                c
            })
            .collect()
    };
    let rad = coeffs.iter().map(|c| linalg::combine(c, tangent, n)).collect();
    Ok((rad, plan))
}

fn orthogonalize(g: &[Vec<Jet>], v: &[Jet], accepted: &[JetVec], eps: &[f64]) -> (JetVec, Jet) {
    let mut w = v.to_vec();
    for (x, e) in accepted.iter().zip(eps) {
        let c = pair(g, v, x) * *e;
        for k in 0..w.len() {
            w[k] -= c * x[k];
        }
    }
    let s = pair(g, &w, &w);
    (w, s)
}

fn normalize(w: &[Jet], s: Jet) -> JetVec {
    let inv = s.abs().sqrt().recip();
    w.iter().map(|c| *c * inv).collect()
}

fn best_screen_candidate(options: Vec<(Vec<usize>, JetVec, Jet)>) -> Option<(Vec<usize>, JetVec, Jet)> {
    let mut best: Option<(f64, (Vec<usize>, JetVec, Jet))> = None;
    for o in options {
        let s = o.2.value().abs();
        let size = linalg::norm_inf(&linalg::vec_values(&o.1));
        let ratio = s / (size * size);
        if s >= SCREEN_PIVOT_TOL && best.as_ref().is_none_or(|(r, _)| ratio > *r) {
            best = Some((ratio, o));
        }
    }
    best.map(|(_, o)| o)
}

/// Pseudo-orthonormal completion of the radical inside the span of
/// `candidates`, `need` vectors long. Each step takes the candidate (or pair
/// sum) with the largest `|g(w,w)| / |w|²` after orthogonalization.
pub fn screen_frame(
    g: &[Vec<Jet>],
    candidates: &[JetVec],
    need: usize,
    plan: Option<&ScreenPlan>,
    p: &[f64],
) -> Result<(Vec<JetVec>, Vec<f64>, ScreenPlan)> {
    let n = g.len();
    let build = |recipe: &[usize]| -> JetVec {
        let mut v = vec![Jet::constant(0.0); n];
        for &i in recipe {
            v = linalg::add(&v, &candidates[i]);
        }
        v
    };
    let mut out: Vec<JetVec> = Vec::new();
    let mut eps: Vec<f64> = Vec::new();
    if let Some(pl) = plan {
        for (recipe, &e) in pl.recipes.iter().zip(&pl.eps) {
            let (w, s) = orthogonalize(g, &build(recipe), &out, &eps);
            if s.value().abs() < SCREEN_PIVOT_TOL || s.value().signum() != e {
                return Err(Error::DegenerateScreen(p.to_vec()));
            }
            out.push(normalize(&w, s));
            eps.push(e);
        }
        return Ok((out, eps, pl.clone()));
    }
    let mut remaining: Vec<usize> = (0..candidates.len()).collect();
    let mut recipes: Vec<Vec<usize>> = Vec::new();
    while out.len() < need {
        let singles: Vec<(Vec<usize>, JetVec, Jet)> = remaining
            .iter()
            .map(|&i| {
                let (w, s) = orthogonalize(g, &candidates[i], &out, &eps);
                (vec![i], w, s)
            })
            .collect();
        let mut chosen = best_screen_candidate(singles);
        if chosen.is_none() {
            let mut pairs = Vec::new();
            for (a, &i) in remaining.iter().enumerate() {
                for &j in &remaining[a + 1..] {
                    let (w, s) = orthogonalize(g, &build(&[i, j]), &out, &eps);
                    pairs.push((vec![i, j], w, s));
                }
            }
            chosen = best_screen_candidate(pairs);
        }
        let (recipe, w, s) = chosen.ok_or_else(|| Error::DegenerateScreen(p.to_vec()))?;
        remaining.retain(|i| *i != recipe[0]);
        out.push(normalize(&w, s));
        eps.push(s.value().signum());
        recipes.push(recipe);
    }
    let plan = ScreenPlan { recipes, eps: eps.clone() };
    Ok((out, eps, plan))
}

impl Foliation {
    fn tangent_and_perp(
        &self,
        mat: &MetricAt,
        plan: Option<&FoliationPlan>,
    ) -> Result<(Vec<JetVec>, Vec<JetVec>, Option<Vec<usize>>, Option<Vec<usize>>)> {
        let n = mat.dim();
        let p = &mat.point;
        match &self.spec {
            FoliationSpec::LevelFunctions { funcs, pivots } => {
                let vals = funcs.iter().map(|f| f.eval_with(&mat.x)).collect::<Result<Vec<_>, _>>()?;
                let jac: Vec<JetVec> = vals.iter().map(|y| (0..n).map(|j| y.partial(j)).collect()).collect();
                let piv = match (plan.and_then(|pl| pl.level_pivots.clone()), pivots) {
                    (Some(pv), _) => pv,
                    (None, Some(pv)) => pv.clone(),
                    (None, None) => auto_pivots(&jac),
                };
                let tangent = kernel_frame(&jac, &piv, p)?;
                let perp = jac.iter().map(|dy| mat.raise(dy)).collect();
                Ok((tangent, perp, Some(piv), None))
            }
            FoliationSpec::ExplicitFrame { fields } => {
                let tangent = fields.iter().map(|f| f.eval_with(&mat.x)).collect::<Result<Vec<_>>>()?;
                let rows: Vec<JetVec> = tangent.iter().map(|e| mat.lower(e)).collect();
                let piv = match plan.and_then(|pl| pl.perp_pivots.clone()) {
                    Some(pv) => pv,
                    None => auto_pivots(&rows),
                };
                let perp = kernel_frame(&rows, &piv, p)?;
                Ok((tangent, perp, None, Some(piv)))
            }
        }
    }

    /// Builds every frame at the point of `mat`, replaying `plan` if given.
    pub fn frames(&self, mat: &MetricAt, plan: Option<&FoliationPlan>) -> Result<(Frames, FoliationPlan)> {
        let n = mat.dim();
        let p = &mat.point;
        let (tangent, perp, level_pivots, perp_pivots) = self.tangent_and_perp(mat, plan)?;
        let m = tangent.len();
        let q = n - m;
        let (radical, rad_plan) = match &self.radical {
            RadicalChoice::Auto => {
                let (rad, pl) = radical_frame(&mat.g, &tangent, plan.and_then(|pl| pl.radical.as_ref()), p)?;
                (rad, Some(pl))
            }
            choice => {
                let rad: Vec<JetVec> = match choice {
                    RadicalChoice::Gradient(a) => {
                        if *a >= perp.len() || !matches!(self.spec, FoliationSpec::LevelFunctions { .. }) {
                            return Err(Error::Invalid("radical gradient needs a level function".to_string()));
                        }
                        vec![perp[*a].clone()]
                    }
                    RadicalChoice::Fields(fs) => fs.iter().map(|f| f.eval_with(&mat.x)).collect::<Result<Vec<_>>>()?,
                    RadicalChoice::Auto => unreachable!(),
                };
                let r = gram_nullity(&gram(&mat.g, &tangent), gram_scale(&mat.g, &tangent));
                let expected = plan.map_or(rad.len(), |pl| pl.r);
                if r != expected || rad.len() != r {
                    if r == 0 && plan.is_none() {
                        return Err(Error::NotLightlike(p.to_vec()));
                    }
                    return Err(Error::NonConstantRank { expected, found: r, point: p.to_vec() });
                }
                (rad, None)
            }
        };
        let r = radical.len();
        let tan_cands = match &self.screen_tan_seed {
            Some(seed) => seed.iter().map(|f| f.eval_with(&mat.x)).collect::<Result<Vec<_>>>()?,
            None => tangent.clone(),
        };
        let perp_cands = match &self.screen_perp_seed {
            Some(seed) => seed.iter().map(|f| f.eval_with(&mat.x)).collect::<Result<Vec<_>>>()?,
            None => perp.clone(),
        };
        let (screen_tan, eps_tan, st_plan) = screen_frame(&mat.g, &tan_cands, m - r, plan.map(|pl| &pl.screen_tan), p)?;
        let (screen_perp, eps_perp, sp_plan) =
            screen_frame(&mat.g, &perp_cands, q - r, plan.map(|pl| &pl.screen_perp), p)?;
        let new_plan = FoliationPlan {
            n,
            m,
            q,
            r,
            level_pivots,
            perp_pivots,
            radical: rad_plan,
            screen_tan: st_plan,
            screen_perp: sp_plan,
        };
        Ok((Frames { tangent, perp, radical, screen_tan, eps_tan, screen_perp, eps_perp }, new_plan))
    }
}

impl Frames {
    /// Largest `|g(ξ_i, E_a)|` over radical and tangent members.
    pub fn radical_residual(&self, g: &[Vec<Jet>]) -> f64 {
        let mut worst = 0.0f64;
        for xi in &self.radical {
            for e in self.tangent.iter().chain(&self.perp) {
                worst = worst.max(pair(g, xi, e).value().abs());
            }
        }
        worst
    }

    /// Largest `|g(X, W)|` between the tangent and perp frames.
    pub fn orthogonality_residual(&self, g: &[Vec<Jet>]) -> f64 {
        let mut worst = 0.0f64;
        for a in &self.tangent {
            for b in &self.perp {
                worst = worst.max(pair(g, a, b).value().abs());
            }
        }
        worst
    }

    /// Number of negative signs in the tangent screen.
    pub fn screen_index(&self) -> usize {
        self.eps_tan.iter().filter(|e| **e < 0.0).count()
    }
}
