//! JSON documents emitted by the commands.

use hh_interval::bounds::FunctionEcho;
use hh_interval::{Certificate, ChainReport};
use serde::Serialize;

use crate::config::RunConfig;

pub const TOOL: &str = "hhiv";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Chain report together with the tool version and the effective config.
#[derive(Debug, Serialize)]
pub struct Report<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    #[serde(flatten)]
    pub chain: &'a ChainReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<&'a Certificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate_g: Option<&'a Certificate>,
    pub config: &'a RunConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Verified,
    /// The certifier found a grid point where f (or g) is not in the class.
    HypothesisUnmet,
    /// The hypothesis held at resolution but an inclusion failed at `tol`.
    InclusionFailed,
}

#[derive(Debug, Serialize)]
pub struct Diagnostic<'a> {
    pub status: Status,
    /// `outer ⊇ inner` pairs that failed at `tol`.
    pub failed_inclusions: Vec<String>,
    #[serde(flatten)]
    pub report: Report<'a>,
}

#[derive(Debug, Serialize)]
pub struct CertifyOutput<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub f: FunctionEcho,
    pub h: String,
    pub certificate: &'a Certificate,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<FunctionEcho>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h2: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate_g: Option<&'a Certificate>,
}

pub fn to_json<S: Serialize>(value: &S, pretty: bool) -> String {
    let mut s = if pretty {
        serde_json::to_string_pretty(value)
    } else {
        serde_json::to_string(value)
    }
    .expect("report types always serialize");
    s.push('\n');
    s
}
