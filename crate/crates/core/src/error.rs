use alloc::string::String;
use alloc::vec::Vec;

use crate::expr::ExprError;

pub type Point = Vec<f64>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("metric is singular at {0:?}")]
    SingularMetric(Point),
    #[error("metric index {found} at {point:?} differs from declared index {declared}")]
    SignatureMismatch { declared: usize, found: usize, point: Point },
    #[error("{0}")]
    Invalid(String),
    #[error("pivot block lost rank at {0:?}")]
    RankDrop(Point),
    #[error("induced metric is nondegenerate at {0:?}")]
    NotLightlike(Point),
    #[error("radical rank {found} at {point:?} differs from {expected}")]
    NonConstantRank { expected: usize, found: usize, point: Point },
    #[error("rank r={r} is invalid for m={m}, q={q}")]
    InvalidRank { m: usize, q: usize, r: usize },
    #[error("no nondegenerate screen pivot at {0:?}")]
    DegenerateScreen(Point),
    #[error("complement pairing with the radical is singular at {0:?}")]
    SingularPairing(Point),
    #[error("frame does not span the tangent space at {0:?}")]
    IncompleteFrame(Point),
    #[error("form degree {0} exceeds the chart dimension {1}")]
    DegreeOverflow(usize, usize),
    #[error("interior product of a 0-form")]
    DegreeUnderflow,
    #[error("form components carry no derivative to differentiate")]
    DerivativeOrder,
    #[error("operation needs the factorial-alternation convention")]
    ConventionMismatch,
    #[error("vector has tangent part {0:e}")]
    NotTransversal(f64),
    #[error("field is not an infinitesimal automorphism (residual {0:e})")]
    NotAutomorphism(f64),
    #[error("pairing g(xi, V) vanishes at {0:?}")]
    DegeneratePairing(Point),
    #[error("form is not basic (residual {0:e})")]
    NotBasic(f64),
    #[error("form is not closed (residual {0:e})")]
    NotClosed(f64),
    #[error("hypothesis {which} fails: {detail}")]
    HypothesisFailure { which: usize, detail: String },
    #[error("f is not lightlike: residual {residual:e} at {point:?}")]
    NotLightlikeFunction { point: Point, residual: f64 },
    #[error("vector is not tangent to the leaves (residual {0:e})")]
    NotTangent(f64),
    #[error("invalid signature (n={n}, s={s})")]
    InvalidSignature { n: usize, s: usize },
    #[error("screen index {found} differs from expected {expected}")]
    IndexMismatch { expected: usize, found: usize },
    #[error("warping function is not positive at {0:?}")]
    NonPositiveWarp(Point),
    #[error("radical rank {found} differs from fibre radical rank {expected}")]
    RankMismatch { expected: usize, found: usize },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
