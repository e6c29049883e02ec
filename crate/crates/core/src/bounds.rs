//! Hermite-Hadamard inclusion chains for harmonically h-convex interval-valued
//! functions.
//!
//! Each chain is a list of named interval terms, outermost first for the
//! h-convex direction. Consecutive terms are checked for inclusion twice: at
//! zero slack on the computed doubles and at the caller's tolerance. The engine
//! never refuses to compute when the convexity hypothesis does not hold; a
//! failed inclusion is data for the caller to interpret together with a
//! [`Certificate`](crate::harmonic::Certificate).
//!
//! With `ξ = 2ab/(a+b)`, `I = ab/(b-a) ∫ f(x)/x² dx` and `H = ∫₀¹ h`:
//!
//! | chain           | terms                                                                 |
//! |-----------------|-----------------------------------------------------------------------|
//! | basic           | `L = f(ξ)/(2h(½))`, `I`, `R = [f(a)+f(b)]·H`                           |
//! | refined         | `L = f(ξ)/(4h(½)²)`, `Delta1`, `I`, `Delta2`, `R = [f(a)+f(b)](½+h(½))H` |
//! | product-right   | `I = ab/(b-a) ∫ fg/x²`, `RHS = M∫h₁h₂ + N∫h₁(t)h₂(1-t)`                |
//! | product-left    | `LHS = f(ξ)g(ξ)/(2h₁(½)h₂(½))`, `RHS = I + M∫h₁(t)h₂(1-t) + N∫h₁h₂`     |
//!
//! where `Delta1 = [f(4ab/(a+3b)) + f(4ab/(3a+b))]/(4h(½))`,
//! `Delta2 = [(f(a)+f(b))/2 + f(ξ)]·H`, `M = f(a)g(a) + f(b)g(b)` and
//! `N = f(a)g(b) + f(b)g(a)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonic::{harmonic_mean, Direction, HarmonicDomain, IVFunction, WeightFunction};
use crate::interval::Interval;
use crate::quadrature::{
    harmonic_weighted_integral, harmonic_weighted_product_integral, QuadratureSpec,
};
use crate::scalar::Scalar;

pub const TERM_L: &str = "L";
pub const TERM_DELTA1: &str = "Delta1";
pub const TERM_I: &str = "I";
pub const TERM_DELTA2: &str = "Delta2";
pub const TERM_R: &str = "R";
pub const TERM_M: &str = "M";
pub const TERM_N: &str = "N";
pub const TERM_LHS: &str = "LHS";
pub const TERM_RHS: &str = "RHS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Theorem {
    Basic,
    Refined,
    ProductRight,
    ProductLeft,
}

impl Theorem {
    pub fn needs_second_function(self) -> bool {
        matches!(self, Theorem::ProductRight | Theorem::ProductLeft)
    }

    pub fn name(self) -> &'static str {
        match self {
            Theorem::Basic => "basic",
            Theorem::Refined => "refined",
            Theorem::ProductRight => "product-right",
            Theorem::ProductLeft => "product-left",
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainSettings<T> {
    pub quadrature: QuadratureSpec<T>,
    /// Slack for the tolerance verdicts.
    pub tol: T,
    pub direction: Direction,
}

impl<T: Scalar> Default for ChainSettings<T> {
    fn default() -> Self {
        ChainSettings {
            quadrature: QuadratureSpec::default(),
            tol: T::lit(1e-9),
            direction: Direction::Sx,
        }
    }
}

impl<T: Scalar> ChainSettings<T> {
    pub fn with_direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Term<T> {
    pub name: String,
    #[serde(flatten)]
    pub value: Interval<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InclusionCheck<T> {
    pub outer: String,
    pub inner: String,
    pub holds_strict: bool,
    pub holds_tol: bool,
    /// Hausdorff distance between the two terms.
    pub gap: T,
}

/// Named scalar factor used while assembling a chain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coefficient<T> {
    pub name: String,
    pub value: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionEcho {
    pub lower: String,
    pub upper: String,
}

impl FunctionEcho {
    fn of<T: Scalar>(f: &IVFunction<T>) -> Self {
        FunctionEcho {
            lower: f.lower_text().to_string(),
            upper: f.upper_text().to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainInputs<T> {
    pub domain: HarmonicDomain<T>,
    pub f: FunctionEcho,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<FunctionEcho>,
    pub h: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h2: Option<String>,
    pub tol: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport<T> {
    pub theorem: Theorem,
    pub direction: Direction,
    pub inputs: ChainInputs<T>,
    pub terms: Vec<Term<T>>,
    pub inclusions: Vec<InclusionCheck<T>>,
    pub coefficients: Vec<Coefficient<T>>,
}

impl<T: Scalar> ChainReport<T> {
    pub fn term(&self, name: &str) -> Option<Interval<T>> {
        self.terms.iter().find(|t| t.name == name).map(|t| t.value)
    }

    pub fn coefficient(&self, name: &str) -> Option<T> {
        self.coefficients
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.value)
    }

    pub fn all_hold_strict(&self) -> bool {
        self.inclusions.iter().all(|c| c.holds_strict)
    }

    pub fn all_hold_tol(&self) -> bool {
        self.inclusions.iter().all(|c| c.holds_tol)
    }

    pub fn max_gap(&self) -> T {
        self.inclusions.iter().fold(T::zero(), |m, c| m.max(c.gap))
    }

    /// Gap between `I` and its outer neighbour in chain order, and between `I`
    /// and its inner neighbour. When `I` is not part of the checked chain (the
    /// product-left chain) the single chain gap is reported as the outer one.
    pub fn gaps_around_integral(&self) -> (Option<T>, Option<T>) {
        let pos = |name: &str| self.terms.iter().position(|t| t.name == name);
        let Some(ip) = pos(TERM_I) else {
            return (self.inclusions.first().map(|c| c.gap), None);
        };
        let mut outer = None;
        let mut inner = None;
        for c in &self.inclusions {
            let other = if c.outer == TERM_I {
                &c.inner
            } else if c.inner == TERM_I {
                &c.outer
            } else {
                continue;
            };
            match pos(other) {
                Some(p) if p < ip => outer = Some(c.gap),
                Some(_) => inner = Some(c.gap),
                None => {}
            }
        }
        if outer.is_none() && inner.is_none() {
            return (self.inclusions.first().map(|c| c.gap), None);
        }
        (outer, inner)
    }
}

struct ChainBuilder<T> {
    terms: Vec<Term<T>>,
    inclusions: Vec<InclusionCheck<T>>,
    coefficients: Vec<Coefficient<T>>,
    tol: T,
    direction: Direction,
}

impl<T: Scalar> ChainBuilder<T> {
    fn new(settings: &ChainSettings<T>) -> Self {
        ChainBuilder {
            terms: Vec::new(),
            inclusions: Vec::new(),
            coefficients: Vec::new(),
            tol: settings.tol,
            direction: settings.direction,
        }
    }

    /// Chain terms in order; each consecutive pair is checked.
    fn chain(&mut self, terms: &[(&str, Interval<T>)]) {
        for pair in terms.windows(2) {
            let ((first, a), (second, b)) = (pair[0], pair[1]);
            let (outer, inner, ov, iv) = match self.direction {
                Direction::Sx => (first, second, a, b),
                Direction::Sv => (second, first, b, a),
            };
            self.inclusions.push(InclusionCheck {
                outer: outer.to_string(),
                inner: inner.to_string(),
                holds_strict: iv.subset_of(&ov, T::zero()),
                holds_tol: iv.subset_of(&ov, self.tol),
                gap: ov.hausdorff(&iv),
            });
        }
        self.extra(terms);
    }

    /// Terms reported but not part of the checked chain.
    fn extra(&mut self, terms: &[(&str, Interval<T>)]) {
        self.terms.extend(terms.iter().map(|(n, v)| Term {
            name: n.to_string(),
            value: *v,
        }));
    }

    fn coefficient(&mut self, name: &str, value: T) {
        self.coefficients.push(Coefficient {
            name: name.to_string(),
            value,
        });
    }

    fn finish(self, theorem: Theorem, inputs: ChainInputs<T>) -> ChainReport<T> {
        ChainReport {
            theorem,
            direction: self.direction,
            inputs,
            terms: self.terms,
            inclusions: self.inclusions,
            coefficients: self.coefficients,
        }
    }
}

fn weight_at_half<T: Scalar>(h: &WeightFunction<T>, label: &str) -> Result<T> {
    let v = h.eval(T::lit(0.5))?;
    if v.is_nan() || v <= T::zero() {
        return Err(Error::UndefinedCoefficient(format!(
            "{label}(1/2) = {v}; the left coefficient needs {label}(1/2) > 0"
        )));
    }
    Ok(v)
}

fn inputs<T: Scalar>(
    f: &IVFunction<T>,
    g: Option<&IVFunction<T>>,
    h: &WeightFunction<T>,
    h2: Option<&WeightFunction<T>>,
    tol: T,
) -> ChainInputs<T> {
    ChainInputs {
        domain: *f.domain(),
        f: FunctionEcho::of(f),
        g: g.map(FunctionEcho::of),
        h: h.to_string(),
        h2: h2.map(|w| w.to_string()),
        tol,
    }
}

fn endpoint_sum<T: Scalar>(f: &IVFunction<T>) -> Result<Interval<T>> {
    let d = f.domain();
    Ok(f.eval(d.a())?.checked_add(&f.eval(d.b())?)?)
}

/// Basic chain: `f(ξ)/(2h(½)) ⊇ I ⊇ [f(a)+f(b)]∫h` for h-convex `f`.
pub fn chain_basic<T: Scalar>(
    f: &IVFunction<T>,
    h: &WeightFunction<T>,
    settings: &ChainSettings<T>,
) -> Result<ChainReport<T>> {
    let half = weight_at_half(h, "h")?;
    let left_coef = (T::lit(2.0) * half).recip();
    let h_int = h.moment()?;

    let left = f.eval(f.domain().harmonic_midpoint())?.scale(left_coef)?;
    let integral = harmonic_weighted_integral(f, &settings.quadrature)?;
    let right = endpoint_sum(f)?.scale(h_int)?;

    let mut b = ChainBuilder::new(settings);
    b.chain(&[(TERM_L, left), (TERM_I, integral), (TERM_R, right)]);
    b.coefficient("left", left_coef);
    b.coefficient("right", h_int);
    Ok(b.finish(Theorem::Basic, inputs(f, None, h, None, settings.tol)))
}

/// Refined chain `L ⊇ Delta1 ⊇ I ⊇ Delta2 ⊇ R` splitting `[a, b]` at `ξ`.
pub fn chain_refined<T: Scalar>(
    f: &IVFunction<T>,
    h: &WeightFunction<T>,
    settings: &ChainSettings<T>,
) -> Result<ChainReport<T>> {
    let half = weight_at_half(h, "h")?;
    let h_int = h.moment()?;
    let d = f.domain();
    let xi = d.harmonic_midpoint();
    let two = T::lit(2.0);
    let four = T::lit(4.0);

    let left_coef = (four * half * half).recip();
    let delta1_coef = (four * half).recip();
    let right_coef = (T::lit(0.5) + half) * h_int;

    let f_xi = f.eval(xi)?;
    let f_ends = endpoint_sum(f)?;
    // 4ab/(a+3b) and 4ab/(3a+b) are the harmonic midpoints of [a, ξ] and [ξ, b]
    let q1 = harmonic_mean(d.a(), xi, T::lit(0.5));
    let q3 = harmonic_mean(xi, d.b(), T::lit(0.5));

    let left = f_xi.scale(left_coef)?;
    let delta1 = f.eval(q1)?.checked_add(&f.eval(q3)?)?.scale(delta1_coef)?;
    let integral = harmonic_weighted_integral(f, &settings.quadrature)?;
    let delta2 = f_ends
        .scale(two.recip())?
        .checked_add(&f_xi)?
        .scale(h_int)?;
    let right = f_ends.scale(right_coef)?;

    let mut b = ChainBuilder::new(settings);
    b.chain(&[
        (TERM_L, left),
        (TERM_DELTA1, delta1),
        (TERM_I, integral),
        (TERM_DELTA2, delta2),
        (TERM_R, right),
    ]);
    b.coefficient("left", left_coef);
    b.coefficient("delta1", delta1_coef);
    b.coefficient("delta2", h_int);
    b.coefficient("right", right_coef);
    Ok(b.finish(Theorem::Refined, inputs(f, None, h, None, settings.tol)))
}

/// `M = f(a)g(a) + f(b)g(b)` and `N = f(a)g(b) + f(b)g(a)`.
pub fn endpoint_products<T: Scalar>(
    f: &IVFunction<T>,
    g: &IVFunction<T>,
) -> Result<(Interval<T>, Interval<T>)> {
    let d = f.domain();
    d.require_same(g.domain())?;
    let (fa, fb) = (f.eval(d.a())?, f.eval(d.b())?);
    let (ga, gb) = (g.eval(d.a())?, g.eval(d.b())?);
    let m = fa.checked_mul(&ga)?.checked_add(&fb.checked_mul(&gb)?)?;
    let n = fa.checked_mul(&gb)?.checked_add(&fb.checked_mul(&ga)?)?;
    Ok((m, n))
}

/// Product chain `I_fg ⊇ M∫h₁h₂ + N∫h₁(t)h₂(1-t)`.
pub fn chain_product_right<T: Scalar>(
    f: &IVFunction<T>,
    g: &IVFunction<T>,
    h1: &WeightFunction<T>,
    h2: &WeightFunction<T>,
    settings: &ChainSettings<T>,
) -> Result<ChainReport<T>> {
    let (m, n) = endpoint_products(f, g)?;
    let same = h1.moment_product(h2)?;
    let mirror = h1.moment_mirror(h2)?;
    let integral = harmonic_weighted_product_integral(f, g, &settings.quadrature)?;
    let rhs = m.scale(same)?.checked_add(&n.scale(mirror)?)?;

    let mut b = ChainBuilder::new(settings);
    b.chain(&[(TERM_I, integral), (TERM_RHS, rhs)]);
    b.extra(&[(TERM_M, m), (TERM_N, n)]);
    b.coefficient("hh", same);
    b.coefficient("hh_mirror", mirror);
    Ok(b.finish(
        Theorem::ProductRight,
        inputs(f, Some(g), h1, Some(h2), settings.tol),
    ))
}

/// Product chain `f(ξ)g(ξ)/(2h₁(½)h₂(½)) ⊇ I_fg + M∫h₁(t)h₂(1-t) + N∫h₁h₂`.
pub fn chain_product_left<T: Scalar>(
    f: &IVFunction<T>,
    g: &IVFunction<T>,
    h1: &WeightFunction<T>,
    h2: &WeightFunction<T>,
    settings: &ChainSettings<T>,
) -> Result<ChainReport<T>> {
    let half1 = weight_at_half(h1, "h1")?;
    let half2 = weight_at_half(h2, "h2")?;
    let left_coef = (T::lit(2.0) * half1 * half2).recip();
    let (m, n) = endpoint_products(f, g)?;
    let same = h1.moment_product(h2)?;
    let mirror = h1.moment_mirror(h2)?;

    let xi = f.domain().harmonic_midpoint();
    let lhs = f.eval(xi)?.checked_mul(&g.eval(xi)?)?.scale(left_coef)?;
    let integral = harmonic_weighted_product_integral(f, g, &settings.quadrature)?;
    let rhs = integral
        .checked_add(&m.scale(mirror)?)?
        .checked_add(&n.scale(same)?)?;

    let mut b = ChainBuilder::new(settings);
    b.chain(&[(TERM_LHS, lhs), (TERM_RHS, rhs)]);
    b.extra(&[(TERM_I, integral), (TERM_M, m), (TERM_N, n)]);
    b.coefficient("left", left_coef);
    b.coefficient("hh", same);
    b.coefficient("hh_mirror", mirror);
    Ok(b.finish(
        Theorem::ProductLeft,
        inputs(f, Some(g), h1, Some(h2), settings.tol),
    ))
}

/// Dispatch on `theorem`. Product chains require `g` and `h2`.
pub fn compute_chain<T: Scalar>(
    theorem: Theorem,
    f: &IVFunction<T>,
    g: Option<&IVFunction<T>>,
    h: &WeightFunction<T>,
    h2: Option<&WeightFunction<T>>,
    settings: &ChainSettings<T>,
) -> Result<ChainReport<T>> {
    let need = || {
        Error::InvalidArgument(format!(
            "theorem {theorem} needs a second function g and a second weight h2"
        ))
    };
    match theorem {
        Theorem::Basic => chain_basic(f, h, settings),
        Theorem::Refined => chain_refined(f, h, settings),
        Theorem::ProductRight => {
            chain_product_right(f, g.ok_or_else(need)?, h, h2.ok_or_else(need)?, settings)
        }
        Theorem::ProductLeft => {
            chain_product_left(f, g.ok_or_else(need)?, h, h2.ok_or_else(need)?, settings)
        }
    }
}
