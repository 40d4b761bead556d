//! Ingham-type inequalities for exponential systems restricted to curves.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod classify;
pub mod curves;
pub mod error;
pub mod fit;
pub mod linalg;
pub mod oscint;
pub mod quadrature;
pub mod riesz;
pub mod rigidity;
pub mod schrodinger;
pub mod sums;
pub mod table;
pub mod verify;

pub use error::{Error, Result};
