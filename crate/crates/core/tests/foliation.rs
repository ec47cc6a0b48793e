mod common;

use common::{all, ex, jet_mat, vf};
use lightfol_core::charforms::{self, KappaRoute};
use lightfol_core::foliation::{classify, FoliationSpec, Kind};
use lightfol_core::forms::Convention;
use lightfol_core::linalg;
use lightfol_core::scenario::Scenario;
use lightfol_core::transversal::FrameBundle;
use lightfol_core::{Error, MetricField};

fn tr_values(b: &FrameBundle) -> Vec<Vec<f64>> {
    b.tr_frame().iter().map(|t| linalg::vec_values(t)).collect()
}

#[test]
fn adapted_frames_on_fixtures() {
    for (name, s, p) in all() {
        let (b, _) = s.bundle_at(&p, None).unwrap();
        assert!(b.ltr_residual() < 1e-9, "{name} ltr {}", b.ltr_residual());
        assert!(b.rad_q_residual() < 1e-9, "{name} rad_q {}", b.rad_q_residual());
        let tr = b.tr_frame();
        for y in &tr {
            for z in &tr {
                let t = b.torsion(y, z);
                assert!(t.iter().all(|c| c.abs() < 1e-8), "{name} torsion {t:?}");
            }
        }
    }
}

#[test]
fn kappa_routes_agree_and_rummler_holds() {
    for (name, s, p) in all() {
        let (b, _) = s.bundle_at(&p, None).unwrap();
        for z in tr_values(&b) {
            let d = charforms::kappa(&b, &z, KappaRoute::Definition);
            let h = charforms::kappa(&b, &z, KappaRoute::MeanCurvature);
            assert!((d - h).abs() < 1e-8, "{name}: {d} vs {h}");
            assert!(charforms::tau_screen_residual(&b, &z) < 1e-8, "{name} tau");
        }
        assert!(charforms::rummler_max(&b, 0.0).unwrap() < 1e-7, "{name} rummler");
    }
}

#[test]
fn offset_kappa_breaks_rummler() {
    let (b, _) = common::flat_hypersurface().bundle_at(&[0.3, -0.2, 0.5], None).unwrap();
    assert!(charforms::rummler_max(&b, 0.5).unwrap() > 1e-3);
}

#[test]
fn divergence_balances_with_derived_coefficients_only() {
    let mut discriminating = 0;
    for (name, mut s, p) in all() {
        s.convention = Convention::FactorialAlternation;
        let (b, _) = s.bundle_at(&p, None).unwrap();
        for y in &b.n {
            let t = charforms::divergence_terms(&b, y).unwrap();
            assert!(t.residual(false) < 1e-6, "{name} divergence {}", t.residual(false));
            if t.kappa.abs() > 1e-3 {
                assert!(t.residual(true) > 1e-4, "{name}: flipped sign should not balance");
                assert!(t.literal_residual() > 1e-4, "{name}: literal coefficient balanced unexpectedly");
                discriminating += 1;
            }
        }
    }
    assert!(discriminating > 0);
    let (b, _) = common::flat_hypersurface().bundle_at(&[0.1, 0.2, 0.3], None).unwrap();
    assert_eq!(charforms::divergence_identity_residual(&b, &b.n[0], false), Err(Error::ConventionMismatch));
}

#[test]
fn gauge_law_rank_one() {
    for (name, s, p) in all().into_iter().filter(|(_, s, _)| s.foliation.spec.codim(s.dim()) == 1) {
        let (b, _) = s.bundle_at(&p, None).unwrap();
        let f = jet_mat(&[&["2 + x1*x2"]], &b);
        let a = jet_mat(&[&["0.5 - x2"]], &b);
        let bm = jet_mat(&[&["1 + 0.2*x1"]], &b);
        for z in tr_values(&b) {
            let (l, r) = charforms::kappa_gauge(&b, &f, &a, &bm, &z).unwrap();
            assert!((l - r).abs() < 1e-7, "{name}: {l} vs {r}");
        }
    }
}

#[test]
fn gauge_law_rank_two() {
    let s = common::warped_r2();
    let (b, _) = s.bundle_at(&[0.3, -0.2, 0.5, 0.7, 0.1], None).unwrap();
    assert_eq!(b.r(), 2);
    let f = jet_mat(&[&["2 + x1*x2", "0.1*x3"], &["x4", "1.5 - x5"]], &b);
    let zero = jet_mat(&[&["0", "0"], &["0", "0"]], &b);
    let a = jet_mat(&[&["0.5 - x2", "0.3*x1"], &["0.2", "x3*x4"]], &b);
    let bm = jet_mat(&[&["1 + 0.2*x1", "0.1"], &["0", "1 - 0.1*x5"]], &b);
    let mut general = 0.0f64;
    for z in tr_values(&b) {
        let (l, r) = charforms::kappa_gauge(&b, &f, &zero, &bm, &z).unwrap();
        assert!((l - r).abs() < 1e-7, "a = 0: {l} vs {r}");
        let (l, r) = charforms::kappa_gauge(&b, &f, &a, &bm, &z).unwrap();
        let d = charforms::kappa_gauge_defect(&b, &f, &a, &bm, &z).unwrap();
        assert!((l - r - d).abs() < 1e-7, "defect does not close: {}", l - r - d);
        general = general.max((l - r).abs());
    }
    // the bare law is off once a mixes radical directions into N
    assert!(general > 1e-6);
}

#[test]
fn transformed_ltr_matches_rebuild() {
    for (name, s, p) in all() {
        let (b, _) = s.bundle_at(&p, None).unwrap();
        let r = b.r();
        let pick = |t: &[&str]| {
            let rows: Vec<Vec<&str>> = (0..r).map(|i| (0..r).map(|j| if i == j { t[0] } else { t[1] }).collect()).collect();
            let refs: Vec<&[&str]> = rows.iter().map(|v| v.as_slice()).collect();
            jet_mat(&refs, &b)
        };
        let (f, a, bm) = (pick(&["2 + 0.1*x1", "0.05*x2"]), pick(&["0.3", "0.1*x1"]), pick(&["1 - 0.1*x2", "0.02"]));
        let (closed, rebuilt) = b.transform_ltr(&f, &a, &bm).unwrap();
        for (x, y) in closed.iter().zip(&rebuilt) {
            let d = linalg::norm_inf(&linalg::vec_values(&linalg::sub(x, y)));
            assert!(d < 1e-8, "{name}: {d}");
        }
    }
}

#[test]
fn plan_replay_keeps_frames_consistent() {
    let s = common::conformal_codim2();
    let pts = vec![vec![0.2, 0.4, -0.3, 0.6], vec![0.25, 0.35, -0.28, 0.62]];
    let bs = s.bundles(&pts).unwrap();
    for b in &bs {
        assert!(b.ltr_residual() < 1e-9);
    }
}

#[test]
fn classification_table() {
    assert_eq!(classify(3, 2, 1).unwrap(), Kind::RLightlike);
    assert_eq!(classify(3, 1, 1).unwrap(), Kind::CoIsotropic);
    assert_eq!(classify(1, 3, 1).unwrap(), Kind::Isotropic);
    assert_eq!(classify(2, 2, 2).unwrap(), Kind::TotallyLightlike);
    assert!(matches!(classify(2, 1, 2), Err(Error::InvalidRank { .. })));
    assert!(matches!(classify(2, 2, 0), Err(Error::InvalidRank { .. })));
}

#[test]
fn riemannian_leaves_are_rejected() {
    let s = Scenario::new(
        MetricField::flat(3, 1).unwrap(),
        FoliationSpec::LevelFunctions { funcs: vec![ex("x2", 3)], pivots: None },
        vec![vf(&["0", "1", "0"])],
    );
    assert!(matches!(s.bundle_at(&[0.1, 0.2, 0.3], None), Err(Error::NotLightlike(_))));
}
