use lightfol_core::forms::{lie_by_brackets, tuples, Convention, FormField, FormJet};
use lightfol_core::{parse_expression, Expr, Jet, VectorField};
use proptest::prelude::*;

fn field_text(c: &[f64], n: usize, k: usize) -> String {
    let i = 1 + k % n;
    let j = 1 + (k + 1) % n;
    format!("({})*sin(x{i}) + ({})*x{i}*x{j} + ({})*exp(0.2*x{j})", c[0], c[1], c[2])
}

fn random_form(c: &[f64], n: usize, k: usize) -> FormField {
    let count = tuples(n, k).len();
    let comps: Vec<Expr> = (0..count)
        .map(|t| parse_expression(&field_text(&c[3 * (t % 10)..], n, t), n).unwrap())
        .collect();
    FormField::new(n, k, comps).unwrap()
}

fn random_field(c: &[f64], n: usize, x: &[Jet]) -> Vec<Jet> {
    let comps: Vec<Expr> = (0..n).map(|i| parse_expression(&field_text(&c[3 * i..], n, i + 3), n).unwrap()).collect();
    VectorField::new(comps).eval_with(x).unwrap()
}

proptest! {
    #[test]
    fn d_squared_vanishes(c in prop::collection::vec(-2.0f64..2.0, 40), n in 2usize..6, k in 0usize..4, p in prop::collection::vec(-1.0f64..1.0, 6)) {
        prop_assume!(k + 2 <= n);
        let x = Jet::seed(&p[..n], 2);
        let w = random_form(&c, n, k).eval_with(&x).unwrap();
        prop_assert!(w.d().unwrap().d().unwrap().max_abs() < 1e-8);
    }

    #[test]
    fn cartan_formula_matches_brackets(c in prop::collection::vec(-2.0f64..2.0, 40), n in 2usize..6, k in 0usize..4, p in prop::collection::vec(-1.0f64..1.0, 6)) {
        prop_assume!(k <= n);
        let x = Jet::seed(&p[..n], 2);
        let w = random_form(&c, n, k).eval_with(&x).unwrap();
        let xf = random_field(&c[1..], n, &x);
        let ys: Vec<Vec<Jet>> = (0..k).map(|j| random_field(&c[2 + j..], n, &x)).collect();
        let lhs = w.lie(&xf).unwrap().eval(&ys).value();
        let rhs = lie_by_brackets(&w, &xf, &ys).value();
        prop_assert!((lhs - rhs).abs() < 1e-8 * rhs.abs().max(1.0), "{} vs {}", lhs, rhs);
    }
}

fn one(c: &[f64]) -> FormJet {
    FormJet::one_form(&c.iter().map(|v| Jet::constant(*v)).collect::<Vec<_>>())
}

fn vecj(c: &[f64]) -> Vec<Jet> {
    c.iter().map(|v| Jet::constant(*v)).collect()
}

#[test]
fn wedge_of_one_forms_by_convention() {
    let (a, b) = (one(&[1.0, 2.0, 0.0]), one(&[0.0, -1.0, 3.0]));
    let (u, v) = (vecj(&[1.0, 0.0, 1.0]), vecj(&[0.5, 1.0, -1.0]));
    let det = 1.0 * (-1.0 + -3.0) - (1.0 * 0.5 + 2.0 * 1.0) * (3.0 * 1.0);
    let unit = a.wedge(&b, Convention::UnitShuffle).unwrap().eval(&[u.clone(), v.clone()]).value();
    let fa = a.wedge(&b, Convention::FactorialAlternation).unwrap().eval(&[u, v]).value();
    assert!((unit - det).abs() < 1e-15);
    assert!((fa - det / 2.0).abs() < 1e-15);
}

#[test]
fn interior_is_an_antiderivation() {
    let (a, b) = (one(&[1.0, 2.0, 0.5]), one(&[0.0, -1.0, 3.0]));
    let x = vecj(&[0.3, 1.0, -2.0]);
    let y = vecj(&[1.0, 1.0, 1.0]);
    let lhs = a.wedge(&b, Convention::UnitShuffle).unwrap().interior(&x).unwrap().eval(std::slice::from_ref(&y)).value();
    let ix = |w: &FormJet| w.eval(std::slice::from_ref(&x)).value();
    let rhs = ix(&a) * b.eval(std::slice::from_ref(&y)).value() - a.eval(&[y]).value() * ix(&b);
    assert!((lhs - rhs).abs() < 1e-14);
}

#[test]
fn degree_errors() {
    let a = one(&[1.0, 0.0]);
    let top = a.wedge(&one(&[0.0, 1.0]), Convention::UnitShuffle).unwrap();
    assert!(top.wedge(&a, Convention::UnitShuffle).is_err());
    assert!(FormJet::scalar(Jet::constant(1.0), 2).interior(&vecj(&[1.0, 0.0])).is_err());
    assert!(FormField::new(3, 2, vec![]).is_err());
}
