//! Exact sparse multivariate polynomials over the rationals.

mod basis;
mod domain;
mod krivine;
mod monomial;
mod polynomial;
mod rational;

pub use basis::{binomial, monomial_basis};
pub use domain::BoxDomain;
pub use krivine::{Generator, KrivineTerm};
pub use monomial::ExponentVec;
pub use polynomial::{Polynomial, Style};
pub use rational::{
    format_rational, integer, is_nonnegative, lcm_of_denominators, parse_rational, rational,
    to_f64, Rational,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("variable count mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("not a number: {0:?}")]
    BadNumber(String),
    #[error("degenerate interval for x{var}: lower bound {lo} is not below upper bound {hi}")]
    DegenerateBox { var: usize, lo: String, hi: String },
}

pub(crate) fn check_dims(left: usize, right: usize) -> Result<(), PolyError> {
    if left == right {
        Ok(())
    } else {
        Err(PolyError::DimensionMismatch { left, right })
    }
}
