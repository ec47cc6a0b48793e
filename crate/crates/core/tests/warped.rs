mod common;

use common::ex;
use lightfol_core::warped::{assemble_warped_metric, fibre_radical_check, FibreMetric, WarpedMetric};
use lightfol_core::{Error, MetricField};

fn line() -> WarpedMetric {
    let fibre = MetricField::new(None, vec![vec![ex("0", 1)]]).unwrap();
    WarpedMetric::new(MetricField::parse_diagonal(Some(0), &["1"]).unwrap(), FibreMetric::Field(fibre), ex("exp(x1)", 1), 1)
        .unwrap()
}

fn pullback(rho: usize) -> WarpedMetric {
    let target = MetricField::parse_diagonal(Some(1), &["-1", "1", "1"]).unwrap();
    let embedding = vec![ex("-sqrt(2)*x1", 2), ex("x1 + x2", 2), ex("x1 - x2", 2)];
    WarpedMetric::new(
        MetricField::parse_diagonal(Some(0), &["1"]).unwrap(),
        FibreMetric::Pullback { target, embedding },
        ex("1 + x1^2", 1),
        rho,
    )
    .unwrap()
}

#[test]
fn degenerate_line_fibre() {
    let w = line();
    assert_eq!(assemble_warped_metric(&w, &[0.0, 0.4]).unwrap(), vec![vec![1.0, 0.0], vec![0.0, 0.0]]);
    let r = fibre_radical_check(&w, &[0.3, -0.7]).unwrap();
    assert_eq!(r.radical.len(), 1);
    assert!(r.span_residual < 1e-9);
}

#[test]
fn pullback_fibre_gram_and_radical() {
    let w = pullback(1);
    assert_eq!(w.fibre_dim, 2);
    let g = assemble_warped_metric(&w, &[0.0, 0.2, -0.3]).unwrap();
    let want = [[1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 2.0]];
    for i in 0..3 {
        for j in 0..3 {
            assert!((g[i][j] - want[i][j]).abs() < 1e-14, "{g:?}");
        }
    }
    let r = fibre_radical_check(&w, &[0.0, 0.2, -0.3]).unwrap();
    let v = &r.radical[0];
    assert!(v[0].abs() < 1e-12 && v[2].abs() < 1e-12 && v[1].abs() > 0.1);
    for p in [[0.5, 0.1, 0.9], [-0.8, -0.4, 0.3]] {
        assert!(fibre_radical_check(&w, &p).unwrap().span_residual < 1e-9);
    }
}

#[test]
fn declared_rank_must_match() {
    assert!(matches!(fibre_radical_check(&pullback(2), &[0.1, 0.2, 0.3]), Err(Error::RankMismatch { expected: 2, found: 1 })));
}

#[test]
fn warp_must_be_positive_and_base_only() {
    let base = MetricField::parse_diagonal(Some(0), &["1"]).unwrap();
    let fibre = FibreMetric::Field(MetricField::parse_diagonal(Some(0), &["1"]).unwrap());
    let w = WarpedMetric::new(base.clone(), fibre.clone(), ex("x1", 1), 0).unwrap();
    assert!(matches!(assemble_warped_metric(&w, &[-1.0, 0.0]), Err(Error::NonPositiveWarp(_))));
    assert!(matches!(WarpedMetric::new(base, fibre, ex("1 + x2^2", 2), 0), Err(Error::Invalid(_))));
}
