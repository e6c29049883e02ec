//! Command-line front end for `hh-interval`.
//!
//! Every command reads one JSON config (`--config PATH`, `-` for stdin) and
//! writes JSON (or CSV for `sweep`) to stdout or `--out`.
//!
//! Exit codes: 0 success, 1 negative verdict, 2 config or parse error,
//! 3 computation error.

pub mod config;
pub mod error;
pub mod report;
pub mod sweep;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use hh_interval::bounds::compute_chain;
use hh_interval::harmonic::certify;

pub use config::{RunConfig, SweepPlan};
pub use error::CliError;
use report::{CertifyOutput, Diagnostic, Report, Status};

#[derive(Debug, Parser)]
#[command(
    name = "hhiv",
    version,
    about = "Interval Hermite-Hadamard bounds for harmonically h-convex functions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the inclusion chain and print it as JSON.
    Enclose(CommonArgs),
    /// Certify the hypothesis, then check the chain. Exit 1 if either fails.
    Verify(CommonArgs),
    /// Grid-certify membership in the h-convex (sx) or h-concave (sv) class.
    Certify(CommonArgs),
    /// Sweep s, a or b and write one CSV row per step.
    Sweep(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON config or sweep plan; `-` reads stdin.
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    /// Inclusion tolerance (overrides the config).
    #[arg(long, value_name = "X")]
    pub tol: Option<f64>,
    /// Certificate grid size N (overrides the config).
    #[arg(long, value_name = "N")]
    pub grid: Option<usize>,
    /// Write output here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Indent JSON output.
    #[arg(long)]
    pub pretty: bool,
}

/// Result of a command: exit code and the document to emit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: u8,
    pub output: String,
}

impl Outcome {
    fn ok(output: String) -> Self {
        Outcome { code: 0, output }
    }
}

fn load_config(args: &CommonArgs) -> Result<RunConfig, CliError> {
    let mut c = RunConfig::from_json(&config::read_source(&args.config)?)?;
    c.apply_overrides(args.tol, args.grid);
    Ok(c)
}

pub fn enclose(config: &RunConfig, pretty: bool) -> Result<Outcome, CliError> {
    let p = config.prepare()?;
    let chain = compute_chain(
        config.theorem,
        &p.f,
        p.g.as_ref(),
        &p.h,
        p.h2.as_ref(),
        &p.settings,
    )
    .map_err(|e| CliError::from_core("", e))?;
    let report = Report {
        tool: report::TOOL,
        version: report::VERSION,
        chain: &chain,
        certificate: None,
        certificate_g: None,
        config,
    };
    Ok(Outcome::ok(report::to_json(&report, pretty)))
}

pub fn verify(config: &RunConfig, pretty: bool) -> Result<Outcome, CliError> {
    let p = config.prepare()?;
    let dir = config.direction;
    let compute = |e| CliError::from_core("", e);
    let cert_f = certify(&p.f, &p.h, config.grid, dir).map_err(compute)?;
    let cert_g = match (&p.g, &p.h2, config.theorem.needs_second_function()) {
        (Some(g), Some(h2), true) => Some(certify(g, h2, config.grid, dir).map_err(compute)?),
        _ => None,
    };
    let chain = compute_chain(
        config.theorem,
        &p.f,
        p.g.as_ref(),
        &p.h,
        p.h2.as_ref(),
        &p.settings,
    )
    .map_err(compute)?;

    let failed_inclusions: Vec<String> = chain
        .inclusions
        .iter()
        .filter(|c| !c.holds_tol)
        .map(|c| format!("{} ⊇ {}", c.outer, c.inner))
        .collect();
    let unmet = cert_f.is_violation() || cert_g.as_ref().is_some_and(|c| c.is_violation());
    let status = if unmet {
        Status::HypothesisUnmet
    } else if !failed_inclusions.is_empty() {
        Status::InclusionFailed
    } else {
        Status::Verified
    };
    let diag = Diagnostic {
        status,
        failed_inclusions,
        report: Report {
            tool: report::TOOL,
            version: report::VERSION,
            chain: &chain,
            certificate: Some(&cert_f),
            certificate_g: cert_g.as_ref(),
            config,
        },
    };
    let code = if status == Status::Verified { 0 } else { 1 };
    Ok(Outcome {
        code,
        output: report::to_json(&diag, pretty),
    })
}

pub fn certify_cmd(config: &RunConfig, pretty: bool) -> Result<Outcome, CliError> {
    let p = config.prepare()?;
    let compute = |e| CliError::from_core("", e);
    let cert_f = certify(&p.f, &p.h, config.grid, config.direction).map_err(compute)?;
    let cert_g = match (&p.g, &p.h2) {
        (Some(g), Some(h2)) => {
            Some(certify(g, h2, config.grid, config.direction).map_err(compute)?)
        }
        _ => None,
    };
    let echo = |f: &hh_interval::IVFunction| hh_interval::bounds::FunctionEcho {
        lower: f.lower_text().to_string(),
        upper: f.upper_text().to_string(),
    };
    let out = CertifyOutput {
        tool: report::TOOL,
        version: report::VERSION,
        f: echo(&p.f),
        h: p.h.to_string(),
        certificate: &cert_f,
        g: cert_g.as_ref().and(p.g.as_ref()).map(echo),
        h2: cert_g.as_ref().and(p.h2.as_ref()).map(|w| w.to_string()),
        certificate_g: cert_g.as_ref(),
    };
    let violated = cert_f.is_violation() || cert_g.as_ref().is_some_and(|c| c.is_violation());
    Ok(Outcome {
        code: u8::from(violated),
        output: report::to_json(&out, pretty),
    })
}

pub fn sweep_cmd(plan: &SweepPlan) -> Result<Outcome, CliError> {
    sweep::run_sweep(plan).map(Outcome::ok)
}

/// Dispatch a parsed command line.
pub fn run(cli: &Cli) -> Result<(Outcome, Option<PathBuf>), CliError> {
    let (outcome, args) = match &cli.command {
        Command::Enclose(a) => (enclose(&load_config(a)?, a.pretty)?, a),
        Command::Verify(a) => (verify(&load_config(a)?, a.pretty)?, a),
        Command::Certify(a) => (certify_cmd(&load_config(a)?, a.pretty)?, a),
        Command::Sweep(a) => {
            let mut plan = SweepPlan::from_json(&config::read_source(&a.config)?)?;
            plan.base.apply_overrides(a.tol, a.grid);
            (sweep_cmd(&plan)?, a)
        }
    };
    Ok((outcome, args.out.clone()))
}
