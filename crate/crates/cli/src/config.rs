//! JSON run configuration and sweep plans.

use std::io::Read;
use std::path::Path;

use hh_interval::bounds::{ChainSettings, Theorem};
use hh_interval::expr::{self, Var};
use hh_interval::harmonic::{Direction, WeightFunction};
use hh_interval::quadrature::{QuadratureSpec, Rule};
use hh_interval::{HarmonicDomain, IVFunction, Weight};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_GRID: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionConfig {
    pub lower: String,
    pub upper: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightKind {
    Linear,
    Constant,
    Power,
    Expr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightConfig {
    pub kind: WeightKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
}

impl WeightConfig {
    pub fn linear() -> Self {
        WeightConfig {
            kind: WeightKind::Linear,
            s: None,
            text: None,
        }
    }

    pub fn power(s: f64) -> Self {
        WeightConfig {
            kind: WeightKind::Power,
            s: Some(s),
            text: None,
        }
    }

    fn build(&self, field: &str) -> Result<Weight, CliError> {
        match self.kind {
            WeightKind::Linear => Ok(WeightFunction::Linear),
            WeightKind::Constant => Ok(WeightFunction::Constant),
            WeightKind::Power => {
                let s = self.s.ok_or_else(|| {
                    CliError::Config(format!("{field}: kind \"power\" needs field `s`"))
                })?;
                WeightFunction::power(s).map_err(|e| CliError::from_core(field, e))
            }
            WeightKind::Expr => {
                let text = self.text.as_deref().ok_or_else(|| {
                    CliError::Config(format!("{field}: kind \"expr\" needs field `text`"))
                })?;
                WeightFunction::custom(text)
                    .map_err(|e| CliError::from_core(&format!("{field}.text"), e))
            }
        }
    }
}

/// Quadrature settings; any omitted field takes its default.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureConfig {
    pub rule: Rule,
    pub panels: usize,
    pub tol: f64,
    pub max_refinements: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        let d = QuadratureSpec::<f64>::default();
        QuadratureConfig {
            rule: d.rule,
            panels: d.panels,
            tol: d.tol,
            max_refinements: d.max_refinements,
        }
    }
}

impl From<QuadratureConfig> for QuadratureSpec<f64> {
    fn from(q: QuadratureConfig) -> Self {
        QuadratureSpec {
            rule: q.rule,
            panels: q.panels,
            tol: q.tol,
            max_refinements: q.max_refinements,
        }
    }
}

fn default_theorem() -> Theorem {
    Theorem::Basic
}

fn default_direction() -> Direction {
    Direction::Sx
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

fn default_grid() -> usize {
    DEFAULT_GRID
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub domain: DomainConfig,
    pub function: FunctionConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<FunctionConfig>,
    pub h: WeightConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h2: Option<WeightConfig>,
    #[serde(default = "default_theorem")]
    pub theorem: Theorem,
    #[serde(default = "default_direction")]
    pub direction: Direction,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_grid")]
    pub grid: usize,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
}

/// A config with every expression parsed and validated.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub f: IVFunction,
    pub g: Option<IVFunction>,
    pub h: Weight,
    pub h2: Option<Weight>,
    pub settings: ChainSettings<f64>,
}

fn check_expr(text: &str, field: &str) -> Result<(), CliError> {
    expr::parse(text, Var::X)
        .map(drop)
        .map_err(|e| CliError::Config(format!("{field}: {e}")))
}

fn build_function(
    fc: &FunctionConfig,
    domain: HarmonicDomain,
    field: &str,
) -> Result<IVFunction, CliError> {
    check_expr(&fc.lower, &format!("{field}.lower"))?;
    check_expr(&fc.upper, &format!("{field}.upper"))?;
    IVFunction::parse(&fc.lower, &fc.upper, domain).map_err(|e| CliError::from_core(field, e))
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))
    }

    /// Command-line overrides for `tol` and `grid`.
    pub fn apply_overrides(&mut self, tol: Option<f64>, grid: Option<usize>) {
        if let Some(t) = tol {
            self.tol = t;
        }
        if let Some(n) = grid {
            self.grid = n;
        }
    }

    /// Check numeric fields and build every function and weight.
    pub fn prepare(&self) -> Result<Prepared, CliError> {
        if !(self.tol.is_finite() && self.tol >= 0.0) {
            return Err(CliError::Config(format!(
                "tol: must be finite and non-negative, got {}",
                self.tol
            )));
        }
        if self.grid < 2 {
            return Err(CliError::Config(format!(
                "grid: must be at least 2, got {}",
                self.grid
            )));
        }
        let quadrature: QuadratureSpec<f64> = self.quadrature.into();
        quadrature
            .validate()
            .map_err(|e| CliError::from_core("quadrature", e))?;
        let domain = HarmonicDomain::new(self.domain.a, self.domain.b)
            .map_err(|e| CliError::from_core("domain", e))?;

        let f = build_function(&self.function, domain, "function")?;
        let h = self.h.build("h")?;
        let g = self
            .g
            .as_ref()
            .map(|g| build_function(g, domain, "g"))
            .transpose()?;
        let h2 = self.h2.as_ref().map(|w| w.build("h2")).transpose()?;
        if self.theorem.needs_second_function() {
            if g.is_none() {
                return Err(CliError::Config(format!(
                    "theorem {}: missing field `g`",
                    self.theorem
                )));
            }
            if h2.is_none() {
                return Err(CliError::Config(format!(
                    "theorem {}: missing field `h2`",
                    self.theorem
                )));
            }
        }
        Ok(Prepared {
            f,
            g,
            h,
            h2,
            settings: ChainSettings {
                quadrature,
                tol: self.tol,
                direction: self.direction,
            },
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParameter {
    S,
    A,
    B,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPlan {
    pub parameter: SweepParameter,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub base: RunConfig,
}

impl SweepPlan {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("sweep plan: {e}")))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.steps < 2 {
            return Err(CliError::Config(format!(
                "steps: must be at least 2, got {}",
                self.steps
            )));
        }
        if !(self.from.is_finite() && self.to.is_finite()) {
            return Err(CliError::Config("from/to: must be finite".into()));
        }
        // equal bounds are allowed and give repeated rows
        if self.from > self.to {
            return Err(CliError::Config(format!(
                "from/to: need from <= to, got {} > {}",
                self.from, self.to
            )));
        }
        let d = self.base.domain;
        let ok = match self.parameter {
            SweepParameter::S => self.base.h.kind == WeightKind::Power,
            SweepParameter::A => self.from > 0.0 && self.to < d.b,
            SweepParameter::B => self.from > d.a,
        };
        if !ok {
            let why = match self.parameter {
                SweepParameter::S => "parameter s needs base.h of kind \"power\"".to_string(),
                SweepParameter::A => format!("parameter a must stay inside (0, {})", d.b),
                SweepParameter::B => format!("parameter b must stay above {}", d.a),
            };
            return Err(CliError::Config(why));
        }
        Ok(())
    }

    /// Parameter values, ascending, endpoints exact.
    pub fn values(&self) -> Vec<f64> {
        let last = self.steps - 1;
        (0..self.steps)
            .map(|i| {
                if i == last {
                    self.to
                } else {
                    self.from + (self.to - self.from) * i as f64 / last as f64
                }
            })
            .collect()
    }

    /// The base config with the swept parameter set to `v`.
    pub fn config_at(&self, v: f64) -> RunConfig {
        let mut c = self.base.clone();
        match self.parameter {
            SweepParameter::S => c.h.s = Some(v),
            SweepParameter::A => c.domain.a = v,
            SweepParameter::B => c.domain.b = v,
        }
        c
    }
}

/// Read a document from `path`, or standard input when `path` is `-`.
pub fn read_source(path: &Path) -> Result<String, CliError> {
    let mut text = String::new();
    let res = if path.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut text).map(drop)
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    res.map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    Ok(text)
}
