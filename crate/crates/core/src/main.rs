//! Command-line front end for first-hit query experiments.
//!
//! Every subcommand reads one TOML config (see the crate README for the
//! schema). Exit codes: 0 on success, 2 for unusable configs, 3 when a
//! requested quantile was unattainable under censoring (reports are
//! still written), 1 for any other failure.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use salopt::harness::{
    condition_report, conditions_csv, estimate_quantiles, render_summary, render_theory,
    scaling_sweep, write_reports, ConfigError, ExperimentConfig, HarnessError,
};

#[derive(Parser)]
#[command(
    name = "salopt",
    version,
    about = "Measures first-hit query complexity of uniform and classification-guided search"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// TOML experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Override the config's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's worker count (0 = machine default).
    #[arg(long)]
    workers: Option<usize>,
    /// Override the config's output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run trials and estimate the first-hit quantile per target level.
    Run(CommonArgs),
    /// Run trials, then fit the scaling slope across target levels.
    Sweep(CommonArgs),
    /// Measure sampler conditions over completion-mode diagnostic runs.
    Conditions(CommonArgs),
    /// Print closed-form references the bound calculators give for a config.
    Theory(CommonArgs),
}

fn load_config(args: &CommonArgs) -> Result<ExperimentConfig, ConfigError> {
    let text = fs::read_to_string(&args.config)
        .map_err(|e| ConfigError::Parse(format!("{}: {e}", args.config.display())))?;
    let mut cfg = ExperimentConfig::parse(&text)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(workers) = args.workers {
        cfg.workers = workers;
    }
    if let Some(out) = &args.out {
        cfg.out = Some(out.clone());
    }
    Ok(cfg)
}

fn config_failure(err: &ConfigError) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(2)
}

fn harness_failure(err: &HarnessError) -> ExitCode {
    eprintln!("error: {err}");
    match err {
        HarnessError::Config(_) => ExitCode::from(2),
        _ => ExitCode::from(1),
    }
}

fn experiment(args: CommonArgs, fit_slope: bool) -> ExitCode {
    let cfg = match load_config(&args) {
        Ok(cfg) => cfg,
        Err(e) => return config_failure(&e),
    };
    let run = match estimate_quantiles(&cfg) {
        Ok(run) => run,
        Err(e) => return harness_failure(&e),
    };
    let slope = fit_slope.then(|| scaling_sweep(&run));
    if let Some(dir) = &cfg.out {
        if let Err(e) = write_reports(dir, &run, slope.as_ref(), None) {
            eprintln!("error: cannot write reports: {e}");
            return ExitCode::from(1);
        }
    }
    print!("{}", render_summary(&run, slope.as_ref(), None));
    if run.estimates.iter().any(|e| e.quantile.is_none()) {
        eprintln!("error: at least one quantile was unattainable under censoring");
        return ExitCode::from(3);
    }
    ExitCode::SUCCESS
}

fn conditions(args: CommonArgs) -> ExitCode {
    let cfg = match load_config(&args) {
        Ok(cfg) => cfg,
        Err(e) => return config_failure(&e),
    };
    let rows = match condition_report(&cfg) {
        Ok(rows) => rows,
        Err(e) => return harness_failure(&e),
    };
    let csv = conditions_csv(&rows);
    if let Some(dir) = &cfg.out {
        if let Err(e) = fs::create_dir_all(dir).and_then(|()| fs::write(dir.join("conditions.csv"), &csv))
        {
            eprintln!("error: cannot write reports: {e}");
            return ExitCode::from(1);
        }
    }
    print!("{csv}");
    ExitCode::SUCCESS
}

fn theory(args: CommonArgs) -> ExitCode {
    let cfg = match load_config(&args) {
        Ok(cfg) => cfg,
        Err(e) => return config_failure(&e),
    };
    print!("{}", render_theory(&cfg));
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run(args) => experiment(args, false),
        Command::Sweep(args) => experiment(args, true),
        Command::Conditions(args) => conditions(args),
        Command::Theory(args) => theory(args),
    }
}
