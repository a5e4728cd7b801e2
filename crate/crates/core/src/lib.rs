//! Kac-Moody algebras, their loop realizations and unitarity checks for
//! highest-weight modules.

pub mod cartan;
pub mod catalog;
pub mod affine;
pub mod error;
pub mod finite_lie;
pub mod linalg;
pub mod reps;
pub mod scalar;
pub mod verma;

pub use error::{KmxError, Result};
pub use scalar::{Rational, Scalar};
