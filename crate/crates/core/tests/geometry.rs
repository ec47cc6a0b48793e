mod common;

use common::{ex, vf};
use lightfol_core::geometry::{
    bracket_at, check_signature, christoffel, covariant_derivative, gradient, hessian, is_killing, laplace_beltrami,
    lie_derivative_metric, MetricAt,
};
use lightfol_core::{Error, MetricField};
use proptest::prelude::*;

fn polar() -> MetricField {
    MetricField::parse_diagonal(Some(0), &["1", "x1^2"]).unwrap()
}

#[test]
fn polar_christoffels() {
    let g = christoffel(&polar(), &[2.0, 0.3]).unwrap();
    // Γ^1_22 = −r, Γ^2_12 = Γ^2_21 = 1/r
    assert!((g[0][1][1] + 2.0).abs() < 1e-15);
    assert!((g[1][0][1] - 0.5).abs() < 1e-15);
    assert!((g[1][1][0] - 0.5).abs() < 1e-15);
    assert_eq!(g[0][0][0], 0.0);
}

#[test]
fn polar_laplacian_and_gradient() {
    let m = polar();
    // Δ r² = 4, Δ (r² cos 2θ) = 0
    assert!((laplace_beltrami(&m, &ex("x1^2", 2), &[1.3, 0.2]).unwrap() - 4.0).abs() < 1e-13);
    assert!(laplace_beltrami(&m, &ex("x1^2*cos(2*x2)", 2), &[1.3, 0.2]).unwrap().abs() < 1e-13);
    let gr = gradient(&m, &ex("x1*x2", 2), &[2.0, 3.0]).unwrap();
    assert!((gr[0] - 3.0).abs() < 1e-15 && (gr[1] - 0.5).abs() < 1e-15);
}

#[test]
fn rotations_are_killing_and_dilations_are_not() {
    let flat = MetricField::flat(2, 0).unwrap();
    let samples = vec![vec![0.3, -0.2], vec![1.0, 2.0]];
    assert!(is_killing(&flat, &vf(&["-x2", "x1"]), &samples, None).unwrap().0);
    let (ok, res) = is_killing(&flat, &vf(&["x1", "x2"]), &samples, None).unwrap();
    assert!(!ok && (res - 8f64.sqrt()).abs() < 1e-12);
    // boosts in R^2_1
    let mink = MetricField::flat(2, 1).unwrap();
    assert!(is_killing(&mink, &vf(&["x2", "x1"]), &samples, None).unwrap().0);
}

#[test]
fn signature_checks() {
    let g = MetricField::parse_diagonal(Some(1), &["-1", "x1"]).unwrap();
    assert_eq!(check_signature(&g, &[2.0, 0.0]).unwrap(), 1);
    assert!(matches!(check_signature(&g, &[-2.0, 0.0]), Err(Error::SignatureMismatch { .. })));
    assert!(matches!(check_signature(&g, &[0.0, 0.0]), Err(Error::SingularMetric(_))));
}

#[test]
fn covariant_derivative_is_torsion_free() {
    let g = MetricField::parse_diagonal(Some(1), &["-exp(x2)", "1 + x1^2", "exp(x1*x3)"]).unwrap();
    let (x, y) = (vf(&["x2", "1", "x1*x3"]), vf(&["sin(x1)", "x3", "2"]));
    let p = [0.3, -0.5, 0.8];
    let a = covariant_derivative(&g, &x, &y, &p).unwrap();
    let b = covariant_derivative(&g, &y, &x, &p).unwrap();
    let br = bracket_at(&x, &y, &p).unwrap();
    for i in 0..3 {
        assert!((a[i] - b[i] - br[i]).abs() < 1e-13);
    }
}

proptest! {
    #[test]
    fn lie_derivative_along_gradient_is_twice_the_hessian(
        c in prop::collection::vec(-1.0f64..1.0, 6),
        p in prop::collection::vec(-0.8f64..0.8, 3),
    ) {
        let g = MetricField::parse_diagonal(Some(1), &["-exp(0.4*x2)", "1 + x1^2", "exp(0.3*x1*x3)"]).unwrap();
        let f = ex(&format!("({})*x1*x2 + ({})*sin(x3) + ({})*x2^3 + ({})*x1", c[0], c[1], c[2], c[3]), 3);
        let mat = MetricAt::new(&g, &p).unwrap();
        let grad = mat.gradient(&f.eval_with(&mat.x).unwrap());
        let l = mat.lie_metric(&grad);
        let e = |i: usize| { let mut v = vec!["0"; 3]; v[i] = "1"; vf(&v) };
        for i in 0..3 {
            for j in 0..3 {
                let h = hessian(&g, &f, &e(i), &e(j), &p).unwrap();
                prop_assert!((l[i][j].value() - 2.0 * h).abs() < 1e-10);
            }
        }
        let direct = lie_derivative_metric(&g, &vf(&["x2", "x3", "x1"]), &p).unwrap();
        prop_assert!((direct[0][1] - direct[1][0]).abs() < 1e-14);
    }
}
