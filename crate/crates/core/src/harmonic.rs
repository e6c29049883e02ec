//! Harmonically convex domains, interval-valued functions, weight functions and
//! the grid certifier for harmonic h-convexity of interval-valued maps.
//!
//! Convention: the weight `t` belongs to `x`. The harmonic mean point is
//! `1 / (t/x + (1-t)/y) = xy / (t·y + (1-t)·x)` and the convexity inclusion reads
//!
//! ```text
//! h(t)·f(x) + h(1-t)·f(y) ⊆ f(xy / (t·y + (1-t)·x))      (SX)
//! f(xy / (t·y + (1-t)·x)) ⊆ h(t)·f(x) + h(1-t)·f(y)      (SV)
//! ```
//!
//! so `t = 1` selects `x`, `t = 0` selects `y`, and `f = [c₁/x, c₂/x]` with
//! `h(t) = t` satisfies both with equality.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{self, ExprNode, Var};
use crate::interval::Interval;
use crate::quadrature::{integrate_scalar, QuadratureSpec, Rule};
use crate::scalar::Scalar;

/// Samples used to validate function and weight invariants at construction.
pub const VALIDATION_SAMPLES: usize = 1024;

/// Custom weights must be finite on `[δ, 1-δ]`.
pub const WEIGHT_EDGE: f64 = 1e-9;

/// Certifier slack in ulps of the compared magnitudes. Only absorbs rounding in
/// the exact-equality cases; any reported violation still fails at zero slack.
const CERTIFY_ULPS: f64 = 32.0;

/// `[a, b]` with `0 < a < b`, closed under weighted harmonic means.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HarmonicDomain<T> {
    a: T,
    b: T,
}

impl<T: Scalar> HarmonicDomain<T> {
    pub fn new(a: T, b: T) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && T::zero() < a && a < b) {
            return Err(Error::InvalidDomain {
                a: a.as_f64(),
                b: b.as_f64(),
            });
        }
        Ok(HarmonicDomain { a, b })
    }

    pub fn a(&self) -> T {
        self.a
    }

    pub fn b(&self) -> T {
        self.b
    }

    pub fn contains(&self, x: T) -> bool {
        self.a <= x && x <= self.b
    }

    /// `ab / (b - a)`.
    pub fn harmonic_factor(&self) -> T {
        self.a * self.b / (self.b - self.a)
    }

    /// The harmonic midpoint `2ab / (a + b)`.
    pub fn harmonic_midpoint(&self) -> T {
        harmonic_mean(self.a, self.b, T::lit(0.5))
    }

    /// `n` evenly spaced points from `a` to `b` inclusive (`n >= 2`).
    pub fn grid(&self, n: usize) -> Vec<T> {
        let last = T::from_usize_lossy(n - 1);
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    self.b
                } else {
                    self.a + (self.b - self.a) * T::from_usize_lossy(i) / last
                }
            })
            .collect()
    }

    pub(crate) fn require_same(&self, other: &Self) -> Result<()> {
        if self != other {
            return Err(Error::DomainMismatch {
                fa: self.a.as_f64(),
                fb: self.b.as_f64(),
                ga: other.a.as_f64(),
                gb: other.b.as_f64(),
            });
        }
        Ok(())
    }
}

/// Weighted harmonic mean `xy / (t·y + (1-t)·x)` of positive `x`, `y`.
///
/// `t = 1` gives `x`, `t = 0` gives `y`. The result is clamped to
/// `[min(x, y), max(x, y)]` so rounding never leaves the segment; the
/// endpoint cases are returned exactly.
pub fn harmonic_mean<T: Scalar>(x: T, y: T, t: T) -> T {
    if t == T::one() || x == y {
        return x;
    }
    if t == T::zero() {
        return y;
    }
    let hm = x * y / (t * y + (T::one() - t) * x);
    hm.max(x.min(y)).min(x.max(y))
}

/// Interval-valued function `x ↦ [lower(x), upper(x)]` with values in R+_I.
#[derive(Debug, Clone, PartialEq)]
pub struct IVFunction<T> {
    lower: ExprNode,
    upper: ExprNode,
    lower_text: String,
    upper_text: String,
    domain: HarmonicDomain<T>,
}

impl<T: Scalar> IVFunction<T> {
    /// Parse both endpoint expressions in `x` and validate on a dense sample.
    pub fn parse(lower: &str, upper: &str, domain: HarmonicDomain<T>) -> Result<Self> {
        let lo = expr::parse(lower, Var::X)?;
        let hi = expr::parse(upper, Var::X)?;
        Self::build(
            lo,
            hi,
            lower.trim().to_string(),
            upper.trim().to_string(),
            domain,
        )
    }

    pub fn from_exprs(lower: ExprNode, upper: ExprNode, domain: HarmonicDomain<T>) -> Result<Self> {
        let (lt, ut) = (lower.to_string(), upper.to_string());
        Self::build(lower, upper, lt, ut, domain)
    }

    fn build(
        lower: ExprNode,
        upper: ExprNode,
        lower_text: String,
        upper_text: String,
        domain: HarmonicDomain<T>,
    ) -> Result<Self> {
        for node in [&lower, &upper] {
            if node.var() == Some(Var::T) {
                return Err(Error::InvalidArgument(
                    "endpoint functions must be written in x".into(),
                ));
            }
        }
        let f = IVFunction {
            lower,
            upper,
            lower_text,
            upper_text,
            domain,
        };
        for x in domain.grid(VALIDATION_SAMPLES) {
            f.eval(x).map_err(|e| match e {
                Error::InvariantViolation { x, reason } => Error::InvalidFunction { x, reason },
                other => Error::InvalidFunction {
                    x: x.as_f64(),
                    reason: other.to_string(),
                },
            })?;
        }
        Ok(f)
    }

    /// Same endpoint expressions on a different domain, re-validated.
    pub fn with_domain(&self, domain: HarmonicDomain<T>) -> Result<Self> {
        Self::build(
            self.lower.clone(),
            self.upper.clone(),
            self.lower_text.clone(),
            self.upper_text.clone(),
            domain,
        )
    }

    pub fn domain(&self) -> &HarmonicDomain<T> {
        &self.domain
    }

    pub fn lower(&self) -> &ExprNode {
        &self.lower
    }

    pub fn upper(&self) -> &ExprNode {
        &self.upper
    }

    pub fn lower_text(&self) -> &str {
        &self.lower_text
    }

    pub fn upper_text(&self) -> &str {
        &self.upper_text
    }

    pub fn is_degenerate(&self) -> bool {
        self.lower == self.upper
    }

    /// `[lower(x), upper(x)]`, checked against `0 < lower(x) <= upper(x)`.
    pub fn eval(&self, x: T) -> Result<Interval<T>> {
        if !self.domain.contains(x) {
            return Err(Error::OutsideDomain {
                x: x.as_f64(),
                a: self.domain.a.as_f64(),
                b: self.domain.b.as_f64(),
            });
        }
        let lo = self.lower.eval(x)?;
        let hi = self.upper.eval(x)?;
        if lo > hi {
            return Err(Error::InvariantViolation {
                x: x.as_f64(),
                reason: format!("lower {lo} exceeds upper {hi}"),
            });
        }
        if lo <= T::zero() {
            return Err(Error::InvariantViolation {
                x: x.as_f64(),
                reason: format!("lower {lo} is not positive"),
            });
        }
        Ok(Interval::new(lo, hi)?)
    }
}

/// Weight function `h` on `[0, 1]`, positive on `(0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightFunction<T> {
    /// `h(t) = t`: harmonically convex.
    Linear,
    /// `h(t) = 1`: harmonically P-convex.
    Constant,
    /// `h(t) = t^s`, `s > 0`: harmonically s-convex.
    Power(T),
    Custom {
        expr: ExprNode,
        text: String,
    },
}

impl<T: Scalar> WeightFunction<T> {
    pub fn power(s: T) -> Result<Self> {
        if !(s.is_finite() && s > T::zero()) {
            return Err(Error::InvalidWeight(format!(
                "power exponent must be positive and finite, got {s}"
            )));
        }
        Ok(WeightFunction::Power(s))
    }

    /// Custom weight in `t`, checked for finite positive values on a dense
    /// sample of `[δ, 1-δ]`.
    pub fn custom(text: &str) -> Result<Self> {
        let expr = expr::parse(text, Var::T)?;
        let w = WeightFunction::Custom {
            expr,
            text: text.trim().to_string(),
        };
        let d = T::lit(WEIGHT_EDGE);
        let span = T::one() - d - d;
        let last = T::from_usize_lossy(VALIDATION_SAMPLES - 1);
        for i in 0..VALIDATION_SAMPLES {
            let t = d + span * T::from_usize_lossy(i) / last;
            let v = w
                .eval(t)
                .map_err(|e| Error::InvalidWeight(format!("h({t}) failed: {e}")))?;
            if v <= T::zero() {
                return Err(Error::InvalidWeight(format!(
                    "h({t}) = {v} is not positive"
                )));
            }
        }
        Ok(w)
    }

    pub fn eval(&self, t: T) -> Result<T> {
        match self {
            WeightFunction::Linear => Ok(t),
            WeightFunction::Constant => Ok(T::one()),
            WeightFunction::Power(s) => Ok(t.powf(*s)),
            WeightFunction::Custom { expr, .. } => Ok(expr.eval(t)?),
        }
    }

    /// Exponent `e` when `h(t) = t^e` (Constant is `e = 0`).
    pub fn exponent(&self) -> Option<T> {
        match self {
            WeightFunction::Linear => Some(T::one()),
            WeightFunction::Constant => Some(T::zero()),
            WeightFunction::Power(s) => Some(*s),
            WeightFunction::Custom { .. } => None,
        }
    }

    /// `∫₀¹ h(t) dt`.
    pub fn moment(&self) -> Result<T> {
        match self.exponent() {
            Some(e) => Ok((e + T::one()).recip()),
            None => self.moment_by_quadrature(),
        }
    }

    /// `∫₀¹ h(t)·k(t) dt`.
    pub fn moment_product(&self, other: &Self) -> Result<T> {
        match (self.exponent(), other.exponent()) {
            (Some(p), Some(q)) => Ok((p + q + T::one()).recip()),
            _ => self.moment_product_by_quadrature(other),
        }
    }

    /// `∫₀¹ h(t)·k(1-t) dt`.
    pub fn moment_mirror(&self, other: &Self) -> Result<T> {
        match (self.exponent(), other.exponent()) {
            (Some(p), Some(q)) => match (small_integer(p), small_integer(q)) {
                (_, Some(n)) => Ok(beta_integer(p, n)),
                (Some(n), _) => Ok(beta_integer(q, n)),
                _ => self.moment_mirror_by_quadrature(other),
            },
            _ => self.moment_mirror_by_quadrature(other),
        }
    }

    pub fn moment_by_quadrature(&self) -> Result<T> {
        integrate_scalar(|t| self.eval(t), T::zero(), T::one(), &moment_spec())
    }

    pub fn moment_product_by_quadrature(&self, other: &Self) -> Result<T> {
        integrate_scalar(
            |t| Ok(self.eval(t)? * other.eval(t)?),
            T::zero(),
            T::one(),
            &moment_spec(),
        )
    }

    pub fn moment_mirror_by_quadrature(&self, other: &Self) -> Result<T> {
        integrate_scalar(
            |t| Ok(self.eval(t)? * other.eval(T::one() - t)?),
            T::zero(),
            T::one(),
            &moment_spec(),
        )
    }
}

impl<T: Scalar> fmt::Display for WeightFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightFunction::Linear => f.write_str("t"),
            WeightFunction::Constant => f.write_str("1"),
            WeightFunction::Power(s) => write!(f, "t^{s}"),
            WeightFunction::Custom { text, .. } => f.write_str(text),
        }
    }
}

fn moment_spec<T: Scalar>() -> QuadratureSpec<T> {
    QuadratureSpec {
        rule: Rule::GaussLegendre(32),
        panels: 8,
        tol: T::lit(1e-10),
        max_refinements: 40,
    }
}

fn small_integer<T: Scalar>(v: T) -> Option<usize> {
    (v >= T::zero() && v <= T::lit(32.0) && v == v.round()).then(|| v.to_usize().unwrap_or(0))
}

/// `∫₀¹ t^p (1-t)^n dt = n! / ((p+1)(p+2)…(p+n+1))`.
fn beta_integer<T: Scalar>(p: T, n: usize) -> T {
    let mut acc = (p + T::one()).recip();
    for j in 1..=n {
        let jf = T::from_usize_lossy(j);
        acc = acc * jf / (p + jf + T::one());
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// h-convex: `h(t)f(x) + h(1-t)f(y) ⊆ f(HM)`.
    Sx,
    /// h-concave: the reversed inclusion.
    Sv,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Sx => "sx",
            Direction::Sv => "sv",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    NoViolationAtResolution,
    Violation,
}

/// A grid point where the inclusion fails.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness<T> {
    pub x: T,
    pub y: T,
    pub t: T,
    /// `h(t)·f(x) + h(1-t)·f(y)`.
    pub lhs: Interval<T>,
    /// `f(HM(x, y, t))`.
    pub rhs: Interval<T>,
    /// Largest endpoint overshoot of the inner interval past the outer one.
    pub gap: T,
    /// Grid indices `(i, j, k)` of `(x, y, t)`.
    pub index: (usize, usize, usize),
}

impl<T: Scalar> Witness<T> {
    /// Recompute the inclusion at this point with zero slack. `Ok(true)` means
    /// it holds, i.e. the witness would be bogus.
    pub fn inclusion_holds(
        &self,
        f: &IVFunction<T>,
        h: &WeightFunction<T>,
        direction: Direction,
    ) -> Result<bool> {
        let (lhs, rhs) = inclusion_sides(f, h, self.x, self.y, self.t)?;
        Ok(match direction {
            Direction::Sx => lhs.subset_of(&rhs, T::zero()),
            Direction::Sv => rhs.subset_of(&lhs, T::zero()),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate<T> {
    pub direction: Direction,
    pub verdict: Verdict,
    pub witness: Option<Witness<T>>,
    /// Grid size `N`: `N × N` points in `[a, b]²` and `N + 1` values of `t`.
    pub resolution: usize,
}

impl<T> Certificate<T> {
    pub fn is_violation(&self) -> bool {
        self.verdict == Verdict::Violation
    }
}

/// `(h(t)f(x) + h(1-t)f(y), f(HM(x, y, t)))`.
pub fn inclusion_sides<T: Scalar>(
    f: &IVFunction<T>,
    h: &WeightFunction<T>,
    x: T,
    y: T,
    t: T,
) -> Result<(Interval<T>, Interval<T>)> {
    let lhs = f
        .eval(x)?
        .scale(h.eval(t)?)?
        .checked_add(&f.eval(y)?.scale(h.eval(T::one() - t)?)?)?;
    let rhs = f.eval(harmonic_mean(x, y, t))?;
    Ok((lhs, rhs))
}

fn slack<T: Scalar>(u: &Interval<T>, v: &Interval<T>) -> T {
    let mag = [u.lo(), u.hi(), v.lo(), v.hi()]
        .into_iter()
        .fold(T::one(), |m, e| m.max(e.abs()));
    T::lit(CERTIFY_ULPS) * T::epsilon() * mag
}

/// Search the `N × N × (N+1)` grid over `[a, b]² × [0, 1]` for a point where
/// the h-convexity inclusion fails.
pub fn certify_sx<T: Scalar>(
    f: &IVFunction<T>,
    h: &WeightFunction<T>,
    n: usize,
) -> Result<Certificate<T>> {
    certify(f, h, n, Direction::Sx)
}

/// As [`certify_sx`] with the inclusion reversed (h-concavity).
pub fn certify_sv<T: Scalar>(
    f: &IVFunction<T>,
    h: &WeightFunction<T>,
    n: usize,
) -> Result<Certificate<T>> {
    certify(f, h, n, Direction::Sv)
}

/// Grid certificate in either direction.
///
/// Cells are checked in parallel; the violation (or error) reported is always
/// the one with the lexicographically smallest `(i, j, k)`.
pub fn certify<T: Scalar>(
    f: &IVFunction<T>,
    h: &WeightFunction<T>,
    n: usize,
    direction: Direction,
) -> Result<Certificate<T>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "certificate grid must be at least 2, got {n}"
        )));
    }
    let xs = f.domain().grid(n);
    let fx: Vec<Interval<T>> = xs.iter().map(|&x| f.eval(x)).collect::<Result<_>>()?;
    let nt = n + 1;
    let nf = T::from_usize_lossy(n);
    let ts: Vec<T> = (0..nt).map(|k| T::from_usize_lossy(k) / nf).collect();
    let h_t: Vec<T> = ts.iter().map(|&t| h.eval(t)).collect::<Result<_>>()?;
    let h_mirror: Vec<T> = (0..nt)
        .map(|k| h.eval(T::from_usize_lossy(n - k) / nf))
        .collect::<Result<_>>()?;

    let check = |cell: usize| -> Option<Result<Witness<T>>> {
        let (i, j, k) = (cell / (n * nt), (cell / nt) % n, cell % nt);
        let run = || -> Result<Option<Witness<T>>> {
            let lhs = fx[i]
                .scale(h_t[k])?
                .checked_add(&fx[j].scale(h_mirror[k])?)?;
            let rhs = f.eval(harmonic_mean(xs[i], xs[j], ts[k]))?;
            let (inner, outer) = match direction {
                Direction::Sx => (lhs, rhs),
                Direction::Sv => (rhs, lhs),
            };
            if inner.subset_of(&outer, slack(&inner, &outer)) {
                return Ok(None);
            }
            Ok(Some(Witness {
                x: xs[i],
                y: xs[j],
                t: ts[k],
                lhs,
                rhs,
                gap: inner.overshoot(&outer),
                index: (i, j, k),
            }))
        };
        run().transpose()
    };

    let found = (0..n * n * nt).into_par_iter().find_map_first(check);
    match found {
        None => Ok(Certificate {
            direction,
            verdict: Verdict::NoViolationAtResolution,
            witness: None,
            resolution: n,
        }),
        Some(Ok(w)) => Ok(Certificate {
            direction,
            verdict: Verdict::Violation,
            witness: Some(w),
            resolution: n,
        }),
        Some(Err(e)) => Err(e),
    }
}

/// Scalar reference check of real-valued harmonic h-convexity
/// `f(HM) <= h(t)f(x) + h(1-t)f(y)` (or `>=` for [`Direction::Sv`]) on the
/// certifier's grid. Returns the first failing `(x, y, t)`.
pub fn scalar_violation<T: Scalar>(
    f: &ExprNode,
    domain: &HarmonicDomain<T>,
    h: &WeightFunction<T>,
    n: usize,
    direction: Direction,
) -> Result<Option<(T, T, T)>> {
    let xs = domain.grid(n);
    let nf = T::from_usize_lossy(n);
    for &x in &xs {
        for &y in &xs {
            for k in 0..=n {
                let t = T::from_usize_lossy(k) / nf;
                let combo = h.eval(t)? * f.eval(x)?
                    + h.eval(T::from_usize_lossy(n - k) / nf)? * f.eval(y)?;
                let at_mean = f.eval(harmonic_mean(x, y, t))?;
                let tol = T::lit(CERTIFY_ULPS)
                    * T::epsilon()
                    * T::one().max(combo.abs()).max(at_mean.abs());
                let ok = match direction {
                    Direction::Sx => at_mean <= combo + tol,
                    Direction::Sv => combo <= at_mean + tol,
                };
                if !ok {
                    return Ok(Some((x, y, t)));
                }
            }
        }
    }
    Ok(None)
}
