use thiserror::Error;

use crate::expr::ExprError;
use crate::interval::IntervalError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Crate-wide error type.
///
/// Values are widened to `f64` so the error stays independent of the scalar type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Interval(#[from] IntervalError),

    #[error(transparent)]
    Expr(#[from] ExprError),

    #[error("invalid domain [{a}, {b}]: require 0 < a < b with both finite")]
    InvalidDomain { a: f64, b: f64 },

    #[error("point x = {x} lies outside the domain [{a}, {b}]")]
    OutsideDomain { x: f64, a: f64, b: f64 },

    /// Construction-time sampling found `0 < lower(x) <= upper(x)` broken.
    #[error("interval-valued function invalid at x = {x}: {reason}")]
    InvalidFunction { x: f64, reason: String },

    /// Same invariant, broken at an evaluation point after construction.
    #[error("interval-valued function left R+_I at x = {x}: {reason}")]
    InvariantViolation { x: f64, reason: String },

    #[error("invalid weight function: {0}")]
    InvalidWeight(String),

    #[error("invalid quadrature settings: {0}")]
    InvalidQuadrature(String),

    #[error(
        "quadrature did not converge on [{lo}, {hi}]: estimated error {estimate:e} exceeds {tol:e} at the refinement limit"
    )]
    Convergence {
        lo: f64,
        hi: f64,
        estimate: f64,
        tol: f64,
    },

    /// A chain coefficient such as `1/(2 h(1/2))` cannot be formed.
    #[error("coefficient undefined: {0}")]
    UndefinedCoefficient(String),

    #[error("functions f and g must share the same domain: [{fa}, {fb}] vs [{ga}, {gb}]")]
    DomainMismatch { fa: f64, fb: f64, ga: f64, gb: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for errors caused by malformed input (expressions, domains, settings)
    /// rather than by a computation that went wrong on valid input.
    pub fn is_input_error(&self) -> bool {
        match self {
            Error::Expr(e) => e.is_parse_error(),
            Error::InvalidDomain { .. }
            | Error::InvalidFunction { .. }
            | Error::InvalidWeight(_)
            | Error::InvalidQuadrature(_)
            | Error::DomainMismatch { .. }
            | Error::InvalidArgument(_) => true,
            _ => false,
        }
    }
}
