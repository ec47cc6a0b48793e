//! Named checks. Each returns a nonnegative residual at one sample.

use lightfol_core::charforms::{self, KappaRoute};
use lightfol_core::foliation::{FoliationPlan, Kind};
use lightfol_core::forms::Convention;
use lightfol_core::geometry::{self, Metric};
use lightfol_core::killingflow::{self, FlowScenario};
use lightfol_core::lightfn::{self, LightlikeFunctionScenario};
use lightfol_core::linalg::{self, JetMat};
use lightfol_core::scenario::Scenario;
use lightfol_core::transversal::FrameBundle;
use lightfol_core::warped::{self, WarpedMetric};
use lightfol_core::{parse_expression, Error, Jet, Result};

use crate::scenario::{Body, Family, Options, ScenarioFile};

pub struct CheckDef {
    pub name: &'static str,
    pub family: Family,
    pub tolerance: f64,
    run: fn(&Ctx, &[f64]) -> Result<f64>,
}

impl CheckDef {
    pub fn run(&self, ctx: &Ctx, p: &[f64]) -> Result<f64> {
        (self.run)(ctx, p)
    }

    pub fn tolerance_for(&self, opts: &Options) -> f64 {
        opts.tolerances.get(self.name).copied().unwrap_or(self.tolerance)
    }
}

/// Shared state for one run; the foliation plan of the first sample is
/// replayed at later samples.
pub struct Ctx<'a> {
    pub file: &'a ScenarioFile,
    plan: Option<FoliationPlan>,
}

impl<'a> Ctx<'a> {
    pub fn new(file: &'a ScenarioFile, samples: &[Vec<f64>]) -> Ctx<'a> {
        let plan = match (&file.body, samples.first()) {
            (Body::Foliation { scenario, .. }, Some(p)) => scenario.bundle_at(p, None).ok().map(|(_, plan)| plan),
            _ => None,
        };
        Ctx { file, plan }
    }

    fn scenario(&self) -> Result<&Scenario> {
        match &self.file.body {
            Body::Foliation { scenario, .. } => Ok(scenario),
            _ => Err(Error::Invalid("not a foliation scenario".into())),
        }
    }

    fn bundle(&self, p: &[f64]) -> Result<FrameBundle> {
        Ok(self.scenario()?.bundle_at(p, self.plan.as_ref())?.0)
    }

    fn factorial_bundle(&self, p: &[f64]) -> Result<FrameBundle> {
        let mut s = self.scenario()?.clone();
        s.convention = Convention::FactorialAlternation;
        Ok(s.bundle_at(p, self.plan.as_ref())?.0)
    }

    fn lightlike(&self) -> Result<&LightlikeFunctionScenario> {
        match &self.file.body {
            Body::Foliation { lightlike: Some(l), .. } => Ok(l),
            _ => Err(Error::Invalid("not a lightlike-function scenario".into())),
        }
    }

    fn flow(&self) -> Result<&FlowScenario> {
        match &self.file.body {
            Body::Flow(f) => Ok(f),
            _ => Err(Error::Invalid("not a flow scenario".into())),
        }
    }

    fn warped(&self) -> Result<&WarpedMetric> {
        match &self.file.body {
            Body::Warped(w) => Ok(w),
            _ => Err(Error::Invalid("not a warped radical scenario".into())),
        }
    }
}

fn vmax(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, f64::max)
}

fn tr_points(b: &FrameBundle) -> Vec<Vec<f64>> {
    b.tr_frame().iter().map(|t| linalg::vec_values(t)).collect()
}

fn ltr(c: &Ctx, p: &[f64]) -> Result<f64> {
    Ok(c.bundle(p)?.ltr_residual())
}

fn rad_q(c: &Ctx, p: &[f64]) -> Result<f64> {
    Ok(c.bundle(p)?.rad_q_residual())
}

fn torsion(c: &Ctx, p: &[f64]) -> Result<f64> {
    let b = c.bundle(p)?;
    let fr = b.full_frame();
    let mut worst = 0.0f64;
    for i in 0..fr.len() {
        for j in i + 1..fr.len() {
            worst = worst.max(linalg::norm_inf(&b.torsion(&fr[i], &fr[j])));
        }
    }
    Ok(worst)
}

fn kappa_routes(c: &Ctx, p: &[f64]) -> Result<f64> {
    let b = c.bundle(p)?;
    Ok(vmax(tr_points(&b).iter().map(|z| {
        (charforms::kappa(&b, z, KappaRoute::Definition) - charforms::kappa(&b, z, KappaRoute::MeanCurvature)).abs()
    })))
}

fn rummler(c: &Ctx, p: &[f64]) -> Result<f64> {
    charforms::rummler_max(&c.bundle(p)?, c.file.options.kappa_offset)
}

fn rummler_filtration(c: &Ctx, p: &[f64]) -> Result<f64> {
    let b = c.factorial_bundle(p)?;
    Ok(charforms::rummler_filtration(&b, 1e-8, c.file.options.kappa_offset)?.1)
}

fn divergence(c: &Ctx, p: &[f64]) -> Result<f64> {
    let b = c.factorial_bundle(p)?;
    let mut worst = 0.0f64;
    for y in &b.n {
        worst = worst.max(charforms::divergence_identity_residual(&b, y, c.file.options.divergence_flip)?);
    }
    Ok(worst)
}

fn tau(c: &Ctx, p: &[f64]) -> Result<f64> {
    let b = c.bundle(p)?;
    Ok(vmax(tr_points(&b).iter().map(|z| charforms::tau_screen_residual(&b, z))))
}

/// Fixed polynomial gauge data `(F, a, b)` evaluated on the bundle's chart.
fn gauge_data(b: &FrameBundle, with_a: bool) -> Result<(JetMat, JetMat, JetMat)> {
    let (r, n) = (b.r(), b.dim());
    let x = |k: usize| format!("x{}", k % n + 1);
    let ev = |t: String| -> Result<Jet> { Ok(parse_expression(&t, n)?.eval_with(&b.mat.x)?) };
    let mut f = vec![Vec::new(); r];
    let mut a = vec![Vec::new(); r];
    let mut bm = vec![Vec::new(); r];
    for i in 0..r {
        for j in 0..r {
            let fe = if i == j { format!("1.5 + 0.3*{}^2", x(i)) } else { format!("0.2*{}", x(i + 2 * j + 1)) };
            let ae = if with_a { format!("0.3 + 0.1*{}", x(2 * i + j)) } else { "0".into() };
            let be = if i == j { format!("1 + 0.1*{}^2", x(i + 1)) } else { format!("0.05*{}", x(i + j + 2)) };
            f[i].push(ev(fe)?);
            a[i].push(ev(ae)?);
            bm[i].push(ev(be)?);
        }
    }
    Ok((f, a, bm))
}

fn gauge_with(c: &Ctx, p: &[f64], with_a: bool, subtract_defect: bool) -> Result<f64> {
    let b = c.bundle(p)?;
    let (f, a, bm) = gauge_data(&b, with_a)?;
    let mut worst = 0.0f64;
    for z in tr_points(&b) {
        let (lhs, rhs) = charforms::kappa_gauge(&b, &f, &a, &bm, &z)?;
        let defect = if subtract_defect { charforms::kappa_gauge_defect(&b, &f, &a, &bm, &z)? } else { 0.0 };
        worst = worst.max((lhs - rhs - defect).abs());
    }
    Ok(worst)
}

fn gauge(c: &Ctx, p: &[f64]) -> Result<f64> {
    gauge_with(c, p, true, false)
}

fn gauge_split(c: &Ctx, p: &[f64]) -> Result<f64> {
    gauge_with(c, p, false, false)
}

fn gauge_defect(c: &Ctx, p: &[f64]) -> Result<f64> {
    gauge_with(c, p, true, true)
}

fn transform_ltr(c: &Ctx, p: &[f64]) -> Result<f64> {
    let b = c.bundle(p)?;
    let (f, a, bm) = gauge_data(&b, true)?;
    let (closed, rebuilt) = b.transform_ltr(&f, &a, &bm)?;
    Ok(vmax(closed.iter().zip(&rebuilt).map(|(x, y)| linalg::norm_inf(&linalg::vec_values(&linalg::sub(x, y))))))
}

fn lightlike(c: &Ctx, p: &[f64]) -> Result<f64> {
    Ok(lightfn::verify_lightlike(c.lightlike()?, &[p.to_vec()])?.null_residual)
}

fn levelset_n(c: &Ctx, p: &[f64]) -> Result<f64> {
    let n = lightfn::build_n_levelset(c.lightlike()?, p)?;
    Ok(n.null_residual.max(n.nf_residual))
}

fn second_fundamental(c: &Ctx, p: &[f64]) -> Result<f64> {
    Ok(lightfn::second_fundamental_on_frame(c.lightlike()?, p)?.1)
}

fn h_vanishes(c: &Ctx, p: &[f64]) -> Result<f64> {
    Ok(lightfn::second_fundamental_on_frame(c.lightlike()?, p)?.0)
}

fn kappa_n(c: &Ctx, p: &[f64]) -> Result<f64> {
    Ok(lightfn::kappa_n(c.lightlike()?, p)?.residual())
}

fn kappa_vanishes(c: &Ctx, p: &[f64]) -> Result<f64> {
    let k = lightfn::kappa_n(c.lightlike()?, p)?;
    Ok(k.formula.abs().max(k.definition.abs()))
}

fn screen_index(c: &Ctx, p: &[f64]) -> Result<f64> {
    let s = lightfn::screen_index_check(c.lightlike()?, p)?;
    Ok(vmax([(s.plus - 1.0).abs(), (s.minus + 1.0).abs(), s.orthogonality]))
}

fn sigma(c: &Ctx, p: &[f64]) -> Result<f64> {
    let s = c.lightlike()?;
    let n = s.dim();
    let ys: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    lightfn::sigma_residual(s, &ys, p)
}

fn killing(c: &Ctx, p: &[f64]) -> Result<f64> {
    let s = c.lightlike()?;
    let v = geometry::is_killing(&s.metric, &s.v, &[p.to_vec()], None)?.1;
    Ok(v.max(lightfn::gradient_killing_residual(s, &[p.to_vec()])?))
}

fn flow_hypotheses(c: &Ctx, p: &[f64]) -> Result<f64> {
    c.flow()?.validate(&[p.to_vec()])?;
    Ok(0.0)
}

fn flow_n(c: &Ctx, p: &[f64]) -> Result<f64> {
    let n = killingflow::build_n_flow(c.flow()?, p)?;
    Ok(n.pairing_residual.max(n.null_residual))
}

fn flow_invariance(c: &Ctx, p: &[f64]) -> Result<f64> {
    Ok(killingflow::build_n_flow(c.flow()?, p)?.invariance_residual)
}

fn alpha_invariance(c: &Ctx, p: &[f64]) -> Result<f64> {
    killingflow::alpha_invariance(c.flow()?, p)
}

fn complemented(c: &Ctx, p: &[f64]) -> Result<f64> {
    Ok(killingflow::complemented_checks(c.flow()?, p)?.max_residual())
}

fn killing_xi(c: &Ctx, p: &[f64]) -> Result<f64> {
    let s = c.flow()?;
    Ok(geometry::is_killing(&s.metric, &s.xi, &[p.to_vec()], None)?.1)
}

fn classification(c: &Ctx, _p: &[f64]) -> Result<f64> {
    let s = c.flow()?;
    let want = if s.dim() >= 3 { Kind::Isotropic } else { Kind::TotallyLightlike };
    Ok(if s.kind()? == want { 0.0 } else { 1.0 })
}

fn warped_radical(c: &Ctx, p: &[f64]) -> Result<f64> {
    Ok(warped::fibre_radical_check(c.warped()?, p)?.span_residual)
}

fn warped_blocks(c: &Ctx, p: &[f64]) -> Result<f64> {
    let w = c.warped()?;
    let q = w.base_dim();
    let g = warped::assemble_warped_metric(w, p)?;
    let gt = linalg::values(&w.base.matrix_with(&Jet::seed(&p[..q], 0))?);
    let gb = linalg::values(&w.fibre.matrix_at(&p[q..], 0)?);
    let f = w.warp.eval_jet(&p[..q], 0)?.value();
    let mut worst = 0.0f64;
    for i in 0..g.len() {
        for j in 0..g.len() {
            let want = match (i < q, j < q) {
                (true, true) => gt[i][j],
                (false, false) => f * f * gb[i - q][j - q],
                _ => 0.0,
            };
            worst = worst.max((g[i][j] - want).abs());
        }
    }
    Ok(worst)
}

macro_rules! check {
    ($name:ident, $family:ident, $tol:expr) => {
        CheckDef { name: stringify!($name), family: Family::$family, tolerance: $tol, run: $name }
    };
}

pub static CHECKS: &[CheckDef] = &[
    check!(ltr, Foliation, 1e-9),
    check!(rad_q, Foliation, 1e-9),
    check!(torsion, Foliation, 1e-8),
    check!(kappa_routes, Foliation, 1e-8),
    check!(rummler, Foliation, 1e-7),
    check!(rummler_filtration, Foliation, 1e-8),
    check!(divergence, Foliation, 1e-6),
    check!(tau, Foliation, 1e-8),
    check!(gauge, Foliation, 1e-7),
    check!(gauge_split, Foliation, 1e-7),
    check!(gauge_defect, Foliation, 1e-7),
    check!(transform_ltr, Foliation, 1e-8),
    check!(lightlike, Lightlike, 1e-9),
    check!(levelset_n, Lightlike, 1e-9),
    check!(second_fundamental, Lightlike, 1e-8),
    check!(h_vanishes, Lightlike, 1e-12),
    check!(kappa_n, Lightlike, 1e-8),
    check!(kappa_vanishes, Lightlike, 1e-10),
    check!(screen_index, Lightlike, 1e-9),
    check!(sigma, Lightlike, 1e-9),
    check!(killing, Lightlike, 1e-9),
    check!(flow_hypotheses, Flow, 0.0),
    check!(flow_n, Flow, 1e-9),
    check!(flow_invariance, Flow, 1e-8),
    check!(alpha_invariance, Flow, 1e-8),
    check!(complemented, Flow, 1e-10),
    check!(killing_xi, Flow, 1e-9),
    check!(classification, Flow, 0.0),
    check!(warped_radical, Warped, 1e-9),
    check!(warped_blocks, Warped, 1e-12),
];

pub fn find(name: &str) -> Option<&'static CheckDef> {
    CHECKS.iter().find(|c| c.name == name)
}
