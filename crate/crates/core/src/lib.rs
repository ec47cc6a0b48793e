//! Pointwise engine for lightlike foliations on coordinate charts.
//!
//! Every derivative is carried by [`Jet`] values seeded at the sample point,
//! so frames, forms and brackets are assembled in jet arithmetic.
#![no_std]

extern crate alloc;

pub mod error;
pub mod expr;
pub mod foliation;
pub mod forms;
pub mod geometry;
pub mod jet;
pub mod killingflow;
pub mod lightfn;
pub mod linalg;
pub mod scenario;
pub mod transversal;
pub mod charforms;
pub mod warped;

pub use error::{Error, Result};
pub use expr::{parse_expression, Expr, ExprError};
pub use geometry::{Metric, MetricAt, MetricField, VectorField};
pub use jet::Jet;
