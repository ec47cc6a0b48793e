#![allow(dead_code)]

use lightfol_core::foliation::{FoliationSpec, RadicalChoice};
use lightfol_core::linalg::JetMat;
use lightfol_core::scenario::Scenario;
use lightfol_core::transversal::FrameBundle;
use lightfol_core::warped::{FibreMetric, WarpedMetric};
use lightfol_core::{parse_expression, Expr, MetricField, VectorField};

pub fn ex(t: &str, n: usize) -> Expr {
    parse_expression(t, n).unwrap()
}

pub fn vf(t: &[&str]) -> VectorField {
    VectorField::parse(t, t.len()).unwrap()
}

/// Flat R^3_1, leaves sqrt(2) x1 + x2 + x3 = c.
pub fn flat_hypersurface() -> Scenario {
    let g = MetricField::flat(3, 1).unwrap();
    let f = ex("sqrt(2)*x1 + x2 + x3", 3);
    let mut s = Scenario::new(g, FoliationSpec::LevelFunctions { funcs: vec![f], pivots: None }, vec![VectorField::constant(&[1.0, 1.0, 1.0])]);
    s.foliation.radical = RadicalChoice::Gradient(0);
    s.foliation.screen_tan_seed = Some(vec![VectorField::constant(&[0.0, 1.0, -1.0])]);
    s
}

/// dt^2 + e^{2t}(-dx2^2 + dx3^2 + dx4^2), leaves x2 - e^{-t} = c.
pub fn warped_exp() -> Scenario {
    let base = MetricField::parse_diagonal(Some(0), &["1"]).unwrap();
    let fib = MetricField::parse_diagonal(Some(1), &["-1", "1", "1"]).unwrap();
    let w = WarpedMetric::new(base, FibreMetric::Field(fib), ex("exp(x1)", 1), 0).unwrap();
    let u = ex("x2 - exp(-x1)", 4);
    let v = vf(&["x1*x3", "1 + x4^2", "x1", "x2"]);
    let mut s = Scenario::new(w, FoliationSpec::LevelFunctions { funcs: vec![u], pivots: None }, vec![v]);
    s.foliation.radical = RadicalChoice::Gradient(0);
    s
}

/// Signature (2,2) fibre warped over a line, two level functions, r = 2.
pub fn warped_r2() -> Scenario {
    let base = MetricField::parse_diagonal(Some(0), &["1"]).unwrap();
    let fib = MetricField::parse_diagonal(Some(2), &["-1", "1", "-1", "1"]).unwrap();
    let w = WarpedMetric::new(base, FibreMetric::Field(fib), ex("exp(x1*x1/2 + x1)", 1), 0).unwrap();
    let funcs = vec![ex("x2 + x3", 5), ex("x4 + x5", 5)];
    let v = vec![vf(&["x1*x3", "1 + x4^2", "x1", "x2", "0"]), vf(&["0", "x5", "0", "1", "x1*x2"])];
    let mut s = Scenario::new(w, FoliationSpec::LevelFunctions { funcs, pivots: None }, v);
    let e = "exp(-x1*x1 - 2*x1)";
    s.foliation.radical = RadicalChoice::Fields(vec![
        vf(&["0", e, e, "0", "0"]),
        vf(&["0", "0", "0", &format!("-{e}"), e]),
    ]);
    s
}

/// Conformally flat R^4_1, leaves {x1 + x2, x3} = const, automatic radical.
pub fn conformal_codim2() -> Scenario {
    let g = MetricField::parse_diagonal(Some(1), &["-exp(2*x3)", "exp(2*x3)", "exp(2*x3)", "exp(2*x3)"]).unwrap();
    let funcs = vec![ex("x1 + x2", 4), ex("x3", 4)];
    Scenario::new(g, FoliationSpec::LevelFunctions { funcs, pivots: None }, vec![vf(&["1", "x4", "0", "x3"])])
}

pub fn all() -> Vec<(&'static str, Scenario, Vec<f64>)> {
    vec![
        ("flat", flat_hypersurface(), vec![0.3, -0.2, 0.5]),
        ("warped_exp", warped_exp(), vec![0.3, -0.2, 0.5, 0.7]),
        ("warped_r2", warped_r2(), vec![0.3, -0.2, 0.5, 0.7, 0.1]),
        ("conformal", conformal_codim2(), vec![0.2, 0.4, -0.3, 0.6]),
    ]
}

pub fn jet_mat(rows: &[&[&str]], b: &FrameBundle) -> JetMat {
    let n = b.dim();
    rows.iter().map(|r| r.iter().map(|t| ex(t, n).eval_with(&b.mat.x).unwrap()).collect()).collect()
}
