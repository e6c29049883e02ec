//! Parameter sweeps written as CSV.

use hh_interval::bounds::compute_chain;
use hh_interval::ChainReport;
use rayon::prelude::*;

use crate::config::SweepPlan;
use crate::error::CliError;

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_num(v: f64) -> String {
    format!("{v:?}")
}

fn step(plan: &SweepPlan, v: f64) -> Result<ChainReport, CliError> {
    let name = format!("{:?}", plan.parameter).to_lowercase();
    let fail = |e: CliError| CliError::Compute(format!("sweep step {name} = {}: {e}", fmt_num(v)));
    let p = plan.config_at(v).prepare().map_err(fail)?;
    compute_chain(
        plan.base.theorem,
        &p.f,
        p.g.as_ref(),
        &p.h,
        p.h2.as_ref(),
        &p.settings,
    )
    .map_err(|e| fail(CliError::from_core("", e)))
}

/// Header: `param_value`, `<term>_lo`/`<term>_hi` per term, then the gap and
/// verdict columns.
pub fn header(report: &ChainReport) -> Vec<String> {
    let mut h = vec!["param_value".to_string()];
    for t in &report.terms {
        h.push(format!("{}_lo", t.name));
        h.push(format!("{}_hi", t.name));
    }
    h.extend(["gap_outer", "gap_inner", "holds_strict", "holds_tol"].map(String::from));
    h
}

pub fn row(v: f64, report: &ChainReport) -> Vec<String> {
    let mut r = vec![fmt_num(v)];
    for t in &report.terms {
        r.push(fmt_num(t.value.lo()));
        r.push(fmt_num(t.value.hi()));
    }
    let (outer, inner) = report.gaps_around_integral();
    r.push(outer.map(fmt_num).unwrap_or_default());
    r.push(inner.map(fmt_num).unwrap_or_default());
    r.push(report.all_hold_strict().to_string());
    r.push(report.all_hold_tol().to_string());
    r
}

/// Run every step (in parallel) and render the CSV. The first failing step
/// in parameter order aborts the sweep.
pub fn run_sweep(plan: &SweepPlan) -> Result<String, CliError> {
    plan.validate()?;
    // validate the base config up front so config errors keep exit code 2
    plan.base.prepare()?;
    let values = plan.values();
    let reports: Vec<_> = values.par_iter().map(|&v| step(plan, v)).collect();

    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let mut wrote_header = false;
    for (v, rep) in values.iter().zip(reports) {
        let rep = rep?;
        if !wrote_header {
            w.write_record(header(&rep)).map_err(csv_err)?;
            wrote_header = true;
        }
        w.write_record(row(*v, &rep)).map_err(csv_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Compute(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Compute(format!("csv: {e}"))
}
