mod common;

use common::{ex, vf};
use lightfol_core::foliation::Kind;
use lightfol_core::forms::FormField;
use lightfol_core::killingflow::{
    alpha_form, alpha_invariance, basic_two_form_residual, build_n_flow, complemented_checks, contraction_check,
    delta_ingredient, FlowScenario,
};
use lightfol_core::{Error, MetricField, VectorField};

fn flat(w: Option<VectorField>) -> FlowScenario {
    FlowScenario::new(MetricField::flat(3, 1).unwrap(), vf(&["1", "1", "0"]), vf(&["1", "0", "0"]), w)
}

fn ppwave(w: Option<VectorField>) -> FlowScenario {
    let g = MetricField::new(
        Some(1),
        vec![
            vec![ex("1 + x1*x3^2", 3), ex("1", 3), ex("0", 3)],
            vec![ex("1", 3), ex("0", 3), ex("0", 3)],
            vec![ex("0", 3), ex("0", 3), ex("1", 3)],
        ],
    )
    .unwrap();
    FlowScenario::new(g, vf(&["0", "1", "0"]), vf(&["1", "x3", "x1"]), w)
}

fn form(n: usize, k: usize, comps: &[&str]) -> FormField {
    FormField::new(n, k, comps.iter().map(|c| ex(c, n)).collect()).unwrap()
}

#[test]
fn flat_transversal_field() {
    let s = flat(None);
    s.validate(&[vec![0.1, 0.2, 0.3]]).unwrap();
    let n = build_n_flow(&s, &[0.1, 0.2, 0.3]).unwrap();
    assert_eq!(n.n, vec![-0.5, 0.5, 0.0]);
    assert!(n.pairing_residual < 1e-15 && n.null_residual < 1e-15 && n.invariance_residual < 1e-15);
    assert!((alpha_form(&s, &[1.0, 1.0, 0.0], &[0.0; 3]).unwrap() - 1.0).abs() < 1e-15);
}

#[test]
fn ppwave_flow_is_invariant() {
    let s = ppwave(None);
    let pts: Vec<Vec<f64>> = vec![vec![0.3, -0.5, 0.7], vec![-0.8, 0.2, 0.1]];
    s.validate(&pts).unwrap();
    for p in &pts {
        let n = build_n_flow(&s, p).unwrap();
        assert!(n.pairing_residual < 1e-9 && n.null_residual < 1e-9 && n.invariance_residual < 1e-8);
        assert!(alpha_invariance(&s, p).unwrap() < 1e-8);
    }
}

#[test]
fn orbit_foliations_are_isotropic() {
    for n in 3..=6 {
        let mut xi = vec![0.0; n];
        xi[0] = 1.0;
        xi[1] = 1.0;
        let mut v = vec![0.0; n];
        v[0] = 1.0;
        let s = FlowScenario::new(MetricField::flat(n, 1).unwrap(), VectorField::constant(&xi), VectorField::constant(&v), None);
        assert_eq!(s.kind().unwrap(), Kind::Isotropic);
    }
}

#[test]
fn complemented_flat_flow() {
    let s = flat(Some(vf(&["0", "0", "1"])));
    let r = complemented_checks(&s, &[0.2, -0.1, 0.4]).unwrap();
    assert!(r.max_residual() < 1e-10);
    assert!(r.condition_3_assumed);
    let omega = form(3, 2, &["0", "-x3", "x3"]);
    assert!(basic_two_form_residual(&s, &omega, &[0.2, -0.1, 0.4]).unwrap() < 1e-12);
    let skew = form(3, 2, &["1", "-x3", "x3"]);
    assert!(basic_two_form_residual(&s, &skew, &[0.2, -0.1, 0.4]).unwrap() > 0.1);
}

#[test]
fn ppwave_with_screen_field_violates_bracket_hypothesis() {
    let s = ppwave(Some(vf(&["0", "0", "1"])));
    match complemented_checks(&s, &[0.3, -0.5, 0.7]) {
        Err(Error::HypothesisFailure { which, .. }) => assert_eq!(which, 1),
        other => panic!("expected a hypothesis failure, got {other:?}"),
    }
}

#[test]
fn degenerate_and_non_killing_inputs() {
    let s = FlowScenario::new(MetricField::flat(3, 1).unwrap(), vf(&["1", "1", "0"]), vf(&["1", "1", "0"]), None);
    assert!(matches!(s.validate(&[vec![0.0; 3]]), Err(Error::DegeneratePairing(_))));
    let s = FlowScenario::new(MetricField::flat(3, 1).unwrap(), vf(&["exp(x3)", "exp(x3)", "0"]), vf(&["1", "0", "0"]), None);
    match s.validate(&[vec![0.1, 0.2, 0.3]]) {
        Err(Error::HypothesisFailure { which, .. }) => assert_eq!(which, 0),
        other => panic!("expected a hypothesis failure, got {other:?}"),
    }
}

#[test]
fn basic_forms_and_their_contractions() {
    let s = flat(None);
    let p = [0.3, 0.1, -0.2];
    let d = delta_ingredient(&s, &form(3, 1, &["1", "-1", "0"]), &p).unwrap();
    assert!(d.basic_residual < 1e-12 && d.closed_residual < 1e-12);
    assert!(matches!(delta_ingredient(&s, &form(3, 1, &["1", "0", "0"]), &p), Err(Error::NotBasic(_))));
    assert!(matches!(delta_ingredient(&s, &form(3, 1, &["0", "0", "x1 - x2 + x3"]), &p), Err(Error::NotClosed(_))));
    let (lie, basic) = contraction_check(&s, &form(3, 2, &["1", "x3", "0"]), &p).unwrap();
    assert!(lie < 1e-12 && basic < 1e-12);
}
