//! Extremal constants for the supremum of k-fold convolutions of
//! nonnegative functions on `{0,…,m}^d`, with exact verification tools.

pub mod constants;
pub mod continuous;
pub mod error;
pub mod grid;
pub mod minimax;
pub mod poisson_binomial;
pub mod report;
pub mod scalar;
pub mod selftest;
pub mod sidon;

pub use error::{Error, Result};
pub use grid::{convolve_many, ratio, GridFn};
pub use scalar::{Number, Rational, Scalar};
