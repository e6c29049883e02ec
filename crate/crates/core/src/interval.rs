//! Closed bounded real intervals `[lo, hi]` and their arithmetic.
//!
//! Operations follow the endpoint formulas of classical interval arithmetic:
//! sums and differences combine endpoints directly, products and quotients take
//! the min/max over all four endpoint combinations. Endpoints are plain floats
//! with round-to-nearest; inclusion is checked with an explicit slack instead of
//! outward rounding.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum IntervalError {
    #[error("interval endpoints must be finite, got [{lo}, {hi}]")]
    NonFinite { lo: f64, hi: f64 },

    #[error("interval endpoints out of order: lo = {lo} > hi = {hi}")]
    Inverted { lo: f64, hi: f64 },

    #[error("{op} overflowed to a non-finite endpoint")]
    Range { op: &'static str },

    #[error("division by an interval containing zero: [{lo}, {hi}]")]
    DivisionByZero { lo: f64, hi: f64 },

    #[error("scalar factor must be finite, got {0}")]
    NonFiniteScalar(f64),
}

/// Closed interval `[lo, hi]` with finite endpoints and `lo <= hi`.
///
/// Serializes as `{"lo": .., "hi": ..}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInterval<T>")]
#[serde(bound(
    serialize = "T: Serialize",
    deserialize = "T: Scalar + Deserialize<'de>"
))]
pub struct Interval<T> {
    lo: T,
    hi: T,
}

#[derive(Deserialize)]
struct RawInterval<T> {
    lo: T,
    hi: T,
}

impl<T: Scalar> TryFrom<RawInterval<T>> for Interval<T> {
    type Error = IntervalError;

    fn try_from(raw: RawInterval<T>) -> Result<Self, Self::Error> {
        Interval::new(raw.lo, raw.hi)
    }
}

impl<T: Scalar> Interval<T> {
    pub fn new(lo: T, hi: T) -> Result<Self, IntervalError> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(IntervalError::NonFinite {
                lo: lo.as_f64(),
                hi: hi.as_f64(),
            });
        }
        if lo > hi {
            return Err(IntervalError::Inverted {
                lo: lo.as_f64(),
                hi: hi.as_f64(),
            });
        }
        Ok(Interval { lo, hi })
    }

    /// Degenerate interval `[v, v]`.
    pub fn point(v: T) -> Result<Self, IntervalError> {
        Self::new(v, v)
    }

    pub fn zero() -> Self {
        Interval {
            lo: T::zero(),
            hi: T::zero(),
        }
    }

    #[inline]
    pub fn lo(&self) -> T {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> T {
        self.hi
    }

    pub fn width(&self) -> T {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> T {
        self.lo + (self.hi - self.lo) / T::lit(2.0)
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    /// Member of R+_I: `lo > 0`.
    pub fn is_positive(&self) -> bool {
        self.lo > T::zero()
    }

    /// Member of R-_I: `hi < 0`.
    pub fn is_negative(&self) -> bool {
        self.hi < T::zero()
    }

    pub fn contains(&self, x: T) -> bool {
        self.lo <= x && x <= self.hi
    }

    fn finish(lo: T, hi: T, op: &'static str) -> Result<Self, IntervalError> {
        if lo.is_finite() && hi.is_finite() {
            Ok(Interval { lo, hi })
        } else {
            Err(IntervalError::Range { op })
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, IntervalError> {
        Self::finish(self.lo + other.lo, self.hi + other.hi, "addition")
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, IntervalError> {
        Self::finish(self.lo - other.hi, self.hi - other.lo, "subtraction")
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, IntervalError> {
        let (lo, hi) = min_max4([
            self.lo * other.lo,
            self.lo * other.hi,
            self.hi * other.lo,
            self.hi * other.hi,
        ]);
        Self::finish(lo, hi, "multiplication")
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, IntervalError> {
        if other.lo <= T::zero() && T::zero() <= other.hi {
            return Err(IntervalError::DivisionByZero {
                lo: other.lo.as_f64(),
                hi: other.hi.as_f64(),
            });
        }
        let (lo, hi) = min_max4([
            self.lo / other.lo,
            self.lo / other.hi,
            self.hi / other.lo,
            self.hi / other.hi,
        ]);
        Self::finish(lo, hi, "division")
    }

    /// Scalar multiple `lambda * [lo, hi]`; a negative factor swaps the endpoints.
    pub fn scale(&self, lambda: T) -> Result<Self, IntervalError> {
        if !lambda.is_finite() {
            return Err(IntervalError::NonFiniteScalar(lambda.as_f64()));
        }
        if lambda > T::zero() {
            Self::finish(lambda * self.lo, lambda * self.hi, "scalar multiplication")
        } else if lambda < T::zero() {
            Self::finish(lambda * self.hi, lambda * self.lo, "scalar multiplication")
        } else {
            Ok(Self::zero())
        }
    }

    /// `self ⊆ other` with slack `tol` on both endpoints. `tol = 0` is exact inclusion.
    pub fn subset_of(&self, other: &Self, tol: T) -> bool {
        debug_assert!(tol >= T::zero());
        other.lo <= self.lo + tol && self.hi <= other.hi + tol
    }

    pub fn superset_of(&self, other: &Self, tol: T) -> bool {
        other.subset_of(self, tol)
    }

    /// Hausdorff-Pompeiu distance `max(|lo - lo'|, |hi - hi'|)`.
    pub fn hausdorff(&self, other: &Self) -> T {
        (self.lo - other.lo).abs().max((self.hi - other.hi).abs())
    }

    /// Largest amount by which `self` sticks out of `other` (0 when contained).
    pub fn overshoot(&self, other: &Self) -> T {
        (other.lo - self.lo).max(self.hi - other.hi).max(T::zero())
    }
}

fn min_max4<T: Scalar>(v: [T; 4]) -> (T, T) {
    let lo = v[0].min(v[1]).min(v[2].min(v[3]));
    let hi = v[0].max(v[1]).max(v[2].max(v[3]));
    (lo, hi)
}

impl<T: Scalar> fmt::Display for Interval<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}
