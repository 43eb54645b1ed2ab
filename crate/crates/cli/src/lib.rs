//! Batch runner for pmelab experiments and the acceptance suite.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod report;
pub mod suite;

use std::path::Path;
use std::time::Instant;

pub use config::{Experiment, ExperimentConfig, OutputFormat, SCHEMA_VERSION};
pub use error::{CliError, CliResult};
pub use report::{Check, Relation, RunReport};
pub use suite::{run_acceptance_suite, CriterionOutcome, SuiteConfig, SuiteSummary};

use output::write_atomic;

/// Validates, computes and returns the report. Nothing is written.
pub fn run(config: &ExperimentConfig) -> CliResult<(RunReport, experiments::Outcome)> {
    config.validate()?;
    let start = Instant::now();
    let outcome = experiments::execute(config)?;
    let mut artifacts: Vec<String> = outcome.tables.iter().map(|t| format!("{}.csv", t.name)).collect();
    if config.format == OutputFormat::CsvSvg {
        artifacts.extend(outcome.plots.iter().map(|p| format!("{}.svg", p.0)));
    }
    let report = RunReport {
        config: config.clone(),
        checks: outcome.checks.clone(),
        artifacts,
        wall_clock_s: start.elapsed().as_secs_f64(),
    };
    Ok((report, outcome))
}

/// [`run`], then writes every artifact and the report into `dir`.
pub fn run_to_dir(config: &ExperimentConfig, dir: &Path) -> CliResult<RunReport> {
    let (report, outcome) = run(config)?;
    std::fs::create_dir_all(dir)?;
    for t in &outcome.tables {
        write_atomic(&dir.join(format!("{}.csv", t.name)), &t.to_csv()?)?;
    }
    if config.format == OutputFormat::CsvSvg {
        for (stem, svg) in &outcome.plots {
            write_atomic(&dir.join(format!("{stem}.svg")), svg.as_bytes())?;
        }
    }
    report.write(dir)?;
    Ok(report)
}
