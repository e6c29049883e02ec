//! Validated-numerics toolkit for Hermite-Hadamard type inclusions of
//! harmonically h-convex interval-valued functions.
//!
//! * [`interval`]: interval arithmetic, inclusion and Hausdorff distance.
//! * [`expr`]: parser and evaluator for the endpoint and weight expressions.
//! * [`harmonic`]: domains, interval-valued functions, weights, the SX/SV
//!   grid certifier.
//! * [`quadrature`]: adaptive interval Riemann integration.
//! * [`bounds`]: the four inclusion chains and their reports.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the aliases below
//! fix the scalar to `f64`.

pub mod bounds;
pub mod error;
pub mod expr;
pub mod harmonic;
pub mod interval;
pub mod quadrature;
pub mod scalar;

pub use bounds::{
    chain_basic, chain_product_left, chain_product_right, chain_refined, compute_chain,
    ChainSettings, Theorem,
};
pub use error::{Error, Result};
pub use expr::{parse, ExprError, ExprNode, Var};
pub use harmonic::{
    certify, certify_sv, certify_sx, harmonic_mean, Direction, Verdict, WeightFunction,
};
pub use interval::IntervalError;
pub use quadrature::{
    harmonic_weighted_integral, harmonic_weighted_product_integral, integrate_iv,
    riemann_sum_oracle, RiemannTag, Rule,
};
pub use scalar::Scalar;

pub type Interval = interval::Interval<f64>;
pub type Interval32 = interval::Interval<f32>;
pub type HarmonicDomain = harmonic::HarmonicDomain<f64>;
pub type IVFunction = harmonic::IVFunction<f64>;
pub type Weight = harmonic::WeightFunction<f64>;
pub type Certificate = harmonic::Certificate<f64>;
pub type QuadratureSpec = quadrature::QuadratureSpec<f64>;
pub type ChainReport = bounds::ChainReport<f64>;
