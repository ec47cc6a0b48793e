use lightfol_core::{parse_expression, ExprError, Jet};
use proptest::prelude::*;

fn fd_grad(text: &str, p: &[f64], i: usize) -> f64 {
    let e = parse_expression(text, p.len()).unwrap();
    let h = 1e-5;
    let mut a = p.to_vec();
    let mut b = p.to_vec();
    a[i] += h;
    b[i] -= h;
    (e.eval_jet(&a, 0).unwrap().value() - e.eval_jet(&b, 0).unwrap().value()) / (2.0 * h)
}

fn poly_text(c: &[f64], n: usize) -> String {
    let mut terms = vec![format!("({})", c[0])];
    let mut k = 1;
    for i in 1..=n {
        terms.push(format!("({})*x{i}", c[k]));
        k += 1;
        for j in i..=n {
            terms.push(format!("({})*x{i}*x{j}^2", c[k]));
            k += 1;
        }
    }
    terms.join(" + ")
}

proptest! {
    #[test]
    fn gradient_matches_central_differences(
        c in prop::collection::vec(-2.0f64..2.0, 30),
        p in prop::collection::vec(-1.0f64..1.0, 3),
        wrap in 0usize..3,
    ) {
        let body = poly_text(&c, 3);
        let text = match wrap {
            0 => body,
            1 => format!("sin({body})"),
            _ => format!("exp(0.3*({body}))"),
        };
        let j = parse_expression(&text, 3).unwrap().eval_jet(&p, 2).unwrap();
        for i in 0..3 {
            let fd = fd_grad(&text, &p, i);
            prop_assert!((j.grad(i) - fd).abs() <= 1e-6 * fd.abs().max(1.0), "{} vs {}", j.grad(i), fd);
        }
    }

    #[test]
    fn display_round_trips(c in prop::collection::vec(-3.0f64..3.0, 30), p in prop::collection::vec(-1.0f64..1.0, 3)) {
        let e = parse_expression(&poly_text(&c, 3), 3).unwrap();
        let again = parse_expression(&e.to_string(), 3).unwrap();
        prop_assert_eq!(e.eval_jet(&p, 2).unwrap(), again.eval_jet(&p, 2).unwrap());
    }
}

#[test]
fn hessian_of_product() {
    // f = x1^2 x2 + sin(x2): f_11 = 2 x2, f_12 = 2 x1, f_22 = -sin(x2)
    let j = parse_expression("x1^2*x2 + sin(x2)", 2).unwrap().eval_jet(&[0.7, -0.4], 2).unwrap();
    assert!((j.hess(0, 0) + 0.8).abs() < 1e-15);
    assert!((j.hess(0, 1) - 1.4).abs() < 1e-15);
    assert!((j.hess(1, 1) - 0.4f64.sin()).abs() < 1e-15);
}

#[test]
fn order_lowers_under_partial() {
    let j = Jet::seed(&[1.0, 2.0], 2);
    let sq = j[0] * j[0] * j[1];
    let d = sq.partial(0);
    assert_eq!(d.order(), 1);
    assert_eq!(d.value(), 4.0);
    assert_eq!(d.grad(1), 2.0);
    assert_eq!(d.partial(1).order(), 0);
}

#[test]
#[should_panic]
fn partial_of_order_zero_panics() {
    let _ = Jet::constant(1.0).truncate(0).partial(0);
}

#[test]
fn parse_errors() {
    assert!(matches!(parse_expression("x1 +", 2), Err(ExprError::Syntax { .. })));
    assert!(parse_expression("x3", 2).is_err());
    assert!(parse_expression("tan(x1)", 2).is_err());
    let e = parse_expression("sqrt(x1)", 1).unwrap();
    assert!(e.eval_jet(&[-1.0], 1).is_err());
}
