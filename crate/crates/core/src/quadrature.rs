//! Adaptive composite quadrature and the interval Riemann integral.
//!
//! An interval-valued integrand is integrated endpoint by endpoint on a shared
//! panel subdivision: `∫[lo(x), hi(x)] dx = [∫lo, ∫hi]`. Each panel carries a
//! coarse/fine pair (Gauss-Legendre with `k` and `2k` nodes, or Simpson on the
//! panel and on its halves); the panel with the largest disagreement is bisected
//! until the summed estimate drops below `tol`.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonic::IVFunction;
use crate::interval::Interval;
use crate::scalar::Scalar;

/// Hard cap on the number of live panels, independent of the depth limit.
const MAX_PANELS: usize = 1 << 16;

/// Panel estimates below this many ulps of the panel magnitude are rounding noise.
const ROUNDOFF_ULPS: f64 = 64.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Rule {
    /// Gauss-Legendre with `k` nodes per panel, `k ∈ {8, 16, 32, 64}`.
    GaussLegendre(usize),
    Simpson,
}

impl Rule {
    pub const GAUSS_LEGENDRE_ORDERS: [usize; 4] = [8, 16, 32, 64];
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::GaussLegendre(k) => write!(f, "gauss-legendre-{k}"),
            Rule::Simpson => f.write_str("simpson"),
        }
    }
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "simpson" {
            return Ok(Rule::Simpson);
        }
        let k = s
            .strip_prefix("gauss-legendre-")
            .and_then(|k| k.parse::<usize>().ok())
            .filter(|k| Rule::GAUSS_LEGENDRE_ORDERS.contains(k))
            .ok_or_else(|| {
                Error::InvalidQuadrature(format!(
                    "unknown rule `{s}`; expected simpson or gauss-legendre-{{8,16,32,64}}"
                ))
            })?;
        Ok(Rule::GaussLegendre(k))
    }
}

impl TryFrom<String> for Rule {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Rule> for String {
    fn from(r: Rule) -> Self {
        r.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec<T> {
    pub rule: Rule,
    /// Initial number of uniform panels.
    pub panels: usize,
    /// Absolute error target for each endpoint integral.
    pub tol: T,
    /// Maximum bisection depth of any panel.
    pub max_refinements: usize,
}

impl<T: Scalar> Default for QuadratureSpec<T> {
    fn default() -> Self {
        QuadratureSpec {
            rule: Rule::GaussLegendre(32),
            panels: 8,
            tol: T::lit(1e-10),
            max_refinements: 20,
        }
    }
}

impl<T: Scalar> QuadratureSpec<T> {
    pub fn validate(&self) -> Result<()> {
        if let Rule::GaussLegendre(k) = self.rule {
            if !Rule::GAUSS_LEGENDRE_ORDERS.contains(&k) {
                return Err(Error::InvalidQuadrature(format!(
                    "gauss-legendre order {k} not in {{8, 16, 32, 64}}"
                )));
            }
        }
        if self.panels == 0 {
            return Err(Error::InvalidQuadrature("panels must be at least 1".into()));
        }
        if !(self.tol > T::zero() && self.tol.is_finite()) {
            return Err(Error::InvalidQuadrature(format!(
                "tol must be positive and finite, got {}",
                self.tol
            )));
        }
        if self.max_refinements == 0 {
            return Err(Error::InvalidQuadrature(
                "max_refinements must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Nodes and weights on [-1, 1].
struct GaussTable {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

fn gauss_legendre_table(n: usize) -> &'static GaussTable {
    static TABLES: [OnceLock<GaussTable>; 5] = [
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
    ];
    let slot = match n {
        8 => 0,
        16 => 1,
        32 => 2,
        64 => 3,
        128 => 4,
        _ => unreachable!("unsupported Gauss-Legendre order {n}"),
    };
    TABLES[slot].get_or_init(|| compute_gauss_legendre(n))
}

/// Newton iteration on the Legendre recurrence.
fn compute_gauss_legendre(n: usize) -> GaussTable {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    GaussTable { nodes, weights }
}

fn gauss_panel<T, const M: usize, F>(f: &F, lo: T, hi: T, n: usize) -> Result<[T; M]>
where
    T: Scalar,
    F: Fn(T) -> Result<[T; M]>,
{
    let table = gauss_legendre_table(n);
    let half = (hi - lo) / T::lit(2.0);
    let mid = lo + half;
    let mut acc = [T::zero(); M];
    for (node, weight) in table.nodes.iter().zip(&table.weights) {
        let v = f(mid + half * T::lit(*node))?;
        let w = T::lit(*weight);
        for (a, vi) in acc.iter_mut().zip(v) {
            *a = *a + w * vi;
        }
    }
    Ok(acc.map(|a| a * half))
}

fn simpson_pair<T, const M: usize, F>(f: &F, lo: T, hi: T) -> Result<([T; M], [T; M])>
where
    T: Scalar,
    F: Fn(T) -> Result<[T; M]>,
{
    let h = hi - lo;
    let mid = lo + h / T::lit(2.0);
    let q1 = lo + h / T::lit(4.0);
    let q3 = lo + h * T::lit(0.75);
    let (f0, f1, f2, f3, f4) = (f(lo)?, f(q1)?, f(mid)?, f(q3)?, f(hi)?);
    let mut coarse = [T::zero(); M];
    let mut fine = [T::zero(); M];
    let four = T::lit(4.0);
    for m in 0..M {
        coarse[m] = h / T::lit(6.0) * (f0[m] + four * f2[m] + f4[m]);
        fine[m] =
            h / T::lit(12.0) * (f0[m] + four * f1[m] + T::lit(2.0) * f2[m] + four * f3[m] + f4[m]);
    }
    Ok((coarse, fine))
}

struct Panel<T, const M: usize> {
    lo: T,
    hi: T,
    depth: usize,
    value: [T; M],
    error: T,
}

fn evaluate_panel<T, const M: usize, F>(
    f: &F,
    lo: T,
    hi: T,
    depth: usize,
    rule: Rule,
) -> Result<Panel<T, M>>
where
    T: Scalar,
    F: Fn(T) -> Result<[T; M]>,
{
    let (coarse, fine) = match rule {
        Rule::GaussLegendre(k) => (gauss_panel(f, lo, hi, k)?, gauss_panel(f, lo, hi, 2 * k)?),
        Rule::Simpson => simpson_pair(f, lo, hi)?,
    };
    let noise = T::lit(ROUNDOFF_ULPS) * T::epsilon();
    let error = coarse
        .iter()
        .zip(&fine)
        .map(|(c, v)| {
            let e = (*v - *c).abs();
            if e <= noise * v.abs() {
                T::zero()
            } else {
                e
            }
        })
        .fold(T::zero(), T::max);
    Ok(Panel {
        lo,
        hi,
        depth,
        value: fine,
        error,
    })
}

/// Sum in a fixed binary-tree order so results do not depend on refinement history.
fn pairwise_sum<T: Scalar>(values: &[T]) -> T {
    match values.len() {
        0 => T::zero(),
        1 => values[0],
        n => pairwise_sum(&values[..n / 2]) + pairwise_sum(&values[n / 2..]),
    }
}

/// Adaptive integration of an `M`-component integrand over `[lo, hi]`.
///
/// All components share one subdivision; a panel's error is the worst component.
pub fn integrate_components<T, const M: usize, F>(
    f: F,
    lo: T,
    hi: T,
    spec: &QuadratureSpec<T>,
) -> Result<[T; M]>
where
    T: Scalar,
    F: Fn(T) -> Result<[T; M]>,
{
    spec.validate()?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidArgument(format!(
            "integration bounds must satisfy lo < hi, got [{lo}, {hi}]"
        )));
    }
    let n0 = spec.panels;
    let step = (hi - lo) / T::from_usize_lossy(n0);
    let mut panels = Vec::with_capacity(n0);
    for i in 0..n0 {
        let a = lo + step * T::from_usize_lossy(i);
        let b = if i + 1 == n0 {
            hi
        } else {
            lo + step * T::from_usize_lossy(i + 1)
        };
        panels.push(evaluate_panel(&f, a, b, 0, spec.rule)?);
    }

    loop {
        let total = pairwise_sum(&panels.iter().map(|p| p.error).collect::<Vec<_>>());
        if total <= spec.tol {
            break;
        }
        let (worst, _) =
            panels
                .iter()
                .enumerate()
                .fold((0, T::neg_infinity()), |(bi, be), (i, p)| {
                    if p.error > be {
                        (i, p.error)
                    } else {
                        (bi, be)
                    }
                });
        let p = &panels[worst];
        if p.depth >= spec.max_refinements || panels.len() >= MAX_PANELS {
            return Err(Error::Convergence {
                lo: lo.as_f64(),
                hi: hi.as_f64(),
                estimate: total.as_f64(),
                tol: spec.tol.as_f64(),
            });
        }
        let (a, b, depth) = (p.lo, p.hi, p.depth + 1);
        let m = a + (b - a) / T::lit(2.0);
        let left = evaluate_panel(&f, a, m, depth, spec.rule)?;
        let right = evaluate_panel(&f, m, b, depth, spec.rule)?;
        panels.splice(worst..=worst, [left, right]);
    }

    let mut out = [T::zero(); M];
    for (m, slot) in out.iter_mut().enumerate() {
        *slot = pairwise_sum(&panels.iter().map(|p| p.value[m]).collect::<Vec<_>>());
    }
    Ok(out)
}

/// Adaptive integral of a real function.
pub fn integrate_scalar<T, F>(f: F, lo: T, hi: T, spec: &QuadratureSpec<T>) -> Result<T>
where
    T: Scalar,
    F: Fn(T) -> Result<T>,
{
    let [v] = integrate_components(|x| f(x).map(|y| [y]), lo, hi, spec)?;
    Ok(v)
}

/// Interval Riemann integral `[∫lower, ∫upper]` of an interval-valued integrand.
pub fn integrate_interval_fn<T, F>(
    f: F,
    lo: T,
    hi: T,
    spec: &QuadratureSpec<T>,
) -> Result<Interval<T>>
where
    T: Scalar,
    F: Fn(T) -> Result<Interval<T>>,
{
    let [l, h] = integrate_components(|x| f(x).map(|v| [v.lo(), v.hi()]), lo, hi, spec)?;
    Ok(Interval::new(l, h)?)
}

/// `∫_lo^hi f(x) dx` for `a <= lo < hi <= b`.
pub fn integrate_iv<T: Scalar>(
    f: &IVFunction<T>,
    lo: T,
    hi: T,
    spec: &QuadratureSpec<T>,
) -> Result<Interval<T>> {
    let d = f.domain();
    if !(d.a() <= lo && lo < hi && hi <= d.b()) {
        return Err(Error::InvalidArgument(format!(
            "integration range [{lo}, {hi}] must satisfy {} <= lo < hi <= {}",
            d.a(),
            d.b()
        )));
    }
    integrate_interval_fn(|x| f.eval(x), lo, hi, spec)
}

/// `ab/(b-a) ∫_a^b f(x)/x² dx`, the weighted mean shared by every chain.
pub fn harmonic_weighted_integral<T: Scalar>(
    f: &IVFunction<T>,
    spec: &QuadratureSpec<T>,
) -> Result<Interval<T>> {
    let d = f.domain();
    let raw = integrate_interval_fn(
        |x| Ok(f.eval(x)?.scale((x * x).recip())?),
        d.a(),
        d.b(),
        spec,
    )?;
    Ok(raw.scale(d.harmonic_factor())?)
}

/// `ab/(b-a) ∫_a^b f(x)g(x)/x² dx` with the product formed by interval
/// multiplication at each node.
pub fn harmonic_weighted_product_integral<T: Scalar>(
    f: &IVFunction<T>,
    g: &IVFunction<T>,
    spec: &QuadratureSpec<T>,
) -> Result<Interval<T>> {
    let d = f.domain();
    d.require_same(g.domain())?;
    let raw = integrate_interval_fn(
        |x| {
            let fg = f.eval(x)?.checked_mul(&g.eval(x)?)?;
            Ok(fg.scale((x * x).recip())?)
        },
        d.a(),
        d.b(),
        spec,
    )?;
    Ok(raw.scale(d.harmonic_factor())?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RiemannTag {
    Left,
    Midpoint,
}

/// Uniform left or midpoint Riemann sum of an interval-valued integrand.
pub fn riemann_sum_fn<T, F>(f: F, lo: T, hi: T, n: usize, tag: RiemannTag) -> Result<Interval<T>>
where
    T: Scalar,
    F: Fn(T) -> Result<Interval<T>>,
{
    if n == 0 {
        return Err(Error::InvalidArgument(
            "panel count must be at least 1".into(),
        ));
    }
    let h = (hi - lo) / T::from_usize_lossy(n);
    let offset = match tag {
        RiemannTag::Left => T::zero(),
        RiemannTag::Midpoint => T::lit(0.5),
    };
    let (mut sl, mut sh) = (T::zero(), T::zero());
    for i in 0..n {
        let x = lo + h * (T::from_usize_lossy(i) + offset);
        let v = f(x)?;
        sl = sl + v.lo();
        sh = sh + v.hi();
    }
    Ok(Interval::new(sl * h, sh * h)?)
}

/// Independent check on [`integrate_iv`]: no adaptivity, no error estimate.
pub fn riemann_sum_oracle<T: Scalar>(
    f: &IVFunction<T>,
    lo: T,
    hi: T,
    n: usize,
    tag: RiemannTag,
) -> Result<Interval<T>> {
    riemann_sum_fn(|x| f.eval(x), lo, hi, n, tag)
}
