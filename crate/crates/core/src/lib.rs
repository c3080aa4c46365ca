//! Ball bodies of log-concave functions and radial mean bodies of convex bodies.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ballbody;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod logconcave;
pub mod piecewise;
pub mod quadrature;
pub mod radialmean;
pub mod verify;

pub use error::{Error, Result};
