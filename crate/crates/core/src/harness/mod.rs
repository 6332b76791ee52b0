//! Experiment harness: configuration, trial driving, and reporting.
//!
//! The harness measures how many objective queries an algorithm needs
//! before it first reaches a target level, as an order statistic over
//! many independent trials, and renders the results as CSV files and a
//! text summary. Everything is deterministic given the config.

pub mod config;
pub mod driver;
pub mod report;

pub use config::{Algorithm, ConfigError, ExperimentConfig, ProblemKind};
pub use driver::{
    condition_report, estimate_quantile, estimate_quantiles, fit_loglog, quantile_rank,
    run_one_trial, scaling_sweep, trial_rng, trial_stream, uniform_theory, ConditionRow,
    ExperimentRun, HarnessError, QuantileEstimate, SlopeReport, TrialRecord, BOOTSTRAP_RESAMPLES,
};
pub use report::{
    conditions_csv, estimates_csv, render_summary, render_theory, trials_csv, write_reports,
};
