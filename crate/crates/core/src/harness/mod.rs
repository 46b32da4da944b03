//! Configuration, problem assembly, noise, rate experiments and outputs.

pub mod axioms;
pub mod config;
pub mod experiment;
pub mod noise;
pub mod output;

use std::path::Path;

pub use axioms::{check_axioms, AxiomReport};
pub use config::{build_problem, ExperimentConfig, Problem, RuleSpec, SourceSpec, WSpec};
pub use experiment::{fit_rate, run_rate_experiment, ExperimentReport, RateSummary, ReportRow};
pub use noise::add_noise;

use crate::error::Result;

/// Runs the experiment and writes report, plot and summary files into `out`.
pub fn run_to_dir(config: &ExperimentConfig, out: &Path) -> Result<ExperimentReport> {
    let report = run_rate_experiment(config)?;
    std::fs::create_dir_all(out)?;
    output::write(
        &out.join(&config.output.report_csv),
        &output::report_csv(&report.rows),
    )?;
    output::write(
        &out.join(&config.output.plot_csv),
        &output::plot_csv(&report.rows),
    )?;
    let summary = serde_json::json!({
        "summary": report.summary,
        "alpha_lower_bound": report.alpha_lower_bound,
        "d_w": report.d_w,
        "kappa_star": report.kappa_star,
        "caveat": report.caveat,
    });
    output::write(
        &out.join(&config.output.summary_json),
        &output::to_json(&summary)?,
    )?;
    Ok(report)
}
