//! Flat TOML experiment configuration.
//!
//! One config file describes one experiment: a problem family, an
//! algorithm, a list of target levels, and trial/reporting controls.
//! Unknown keys are rejected so typos fail loudly, and every value is
//! validated before any trial runs.

use std::path::PathBuf;

use serde::Deserialize;
use thiserror::Error;

use crate::engine::{default_schedule, LearnerChoice, SacConfig, SchedulePreset};
use crate::problems::{Problem, ProblemError, SphereProblem, SpikeProblem};
use rand::Rng;

/// Errors from reading or validating a config.
#[derive(Debug, Error)]
pub enum ConfigError {
    /// The TOML text does not match the schema.
    #[error("cannot parse config: {0}")]
    Parse(String),
    /// The schema parsed but a value is out of range or inconsistent.
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Problem family selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    /// Mean squared distance on the unit box.
    Sphere,
    /// Sawtooth distance profile on the centered box.
    Spike,
}

/// Algorithm selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    /// Pure uniform search.
    Uniform,
    /// Mixture optimizer, enclosing-ball preset.
    Sac1,
    /// Mixture optimizer, one-side preset.
    Sac2,
}

impl Algorithm {
    /// The config-file name of the algorithm.
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Uniform => "uniform",
            Algorithm::Sac1 => "sac1",
            Algorithm::Sac2 => "sac2",
        }
    }
}

/// File schema: flat keys, no tables, unknown keys rejected.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    problem: String,
    dimension: usize,
    algorithm: String,
    alpha_star: Vec<f64>,
    trials: Option<u64>,
    delta: Option<f64>,
    budget: Option<u64>,
    seed: Option<u64>,
    workers: Option<usize>,
    out: Option<String>,
    x_star: Option<Vec<f64>>,
    m0: Option<usize>,
    mt: Option<usize>,
    lambda: Option<f64>,
    learner: Option<String>,
    diag_runs: Option<usize>,
    mc_samples: Option<u64>,
}

/// A validated experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Problem family.
    pub problem: ProblemKind,
    /// Domain dimension.
    pub dimension: usize,
    /// Algorithm to run.
    pub algorithm: Algorithm,
    /// Target levels, all in `(0, 1)`, duplicates rejected.
    pub alpha_star: Vec<f64>,
    /// Independent trials per target level (default 1000).
    pub trials: u64,
    /// Failure level of the estimated quantile (default 0.1).
    pub delta: f64,
    /// Per-trial query cap; trials without a hit inside it are censored
    /// (default 1,000,000).
    pub budget: u64,
    /// Master seed; every trial derives its own stream (default 0).
    pub seed: u64,
    /// Worker threads; 0 picks the machine default (default 0).
    pub workers: usize,
    /// Output directory for CSV reports.
    pub out: Option<PathBuf>,
    /// Explicit optimum; drawn uniformly per trial when absent.
    pub x_star: Option<Vec<f64>>,
    /// Override of the preset initialization batch size.
    pub m0: Option<usize>,
    /// Override of the preset per-iteration batch size.
    pub mt: Option<usize>,
    /// Override of the preset mixture weight.
    pub lambda: Option<f64>,
    /// Override of the preset learner.
    pub learner: Option<LearnerChoice>,
    /// Completion-mode runs per condition report (default 10).
    pub diag_runs: usize,
    /// Monte Carlo draws per measure estimate (default 100,000).
    pub mc_samples: u64,
}

impl ExperimentConfig {
    /// Parses and validates a TOML config.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        Self::from_raw(raw)
    }

    fn from_raw(raw: RawConfig) -> Result<Self, ConfigError> {
        let invalid = |msg: String| Err(ConfigError::Invalid(msg));

        let problem = match raw.problem.as_str() {
            "sphere" => ProblemKind::Sphere,
            "spike" => ProblemKind::Spike,
            other => {
                return invalid(format!(
                    "problem {other:?} unknown; expected \"sphere\" or \"spike\""
                ))
            }
        };
        let algorithm = match raw.algorithm.as_str() {
            "uniform" => Algorithm::Uniform,
            "sac1" => Algorithm::Sac1,
            "sac2" => Algorithm::Sac2,
            other => {
                return invalid(format!(
                    "algorithm {other:?} unknown; expected \"uniform\", \"sac1\", or \"sac2\""
                ))
            }
        };
        if raw.dimension == 0 {
            return invalid("dimension must be at least 1".into());
        }
        if raw.alpha_star.is_empty() {
            return invalid("alpha_star must list at least one target level".into());
        }
        for &a in &raw.alpha_star {
            if !(a > 0.0 && a < 1.0) {
                return invalid(format!("target level {a} outside (0, 1)"));
            }
        }
        for (i, &a) in raw.alpha_star.iter().enumerate() {
            if raw.alpha_star[..i].contains(&a) {
                return invalid(format!("target level {a} listed twice"));
            }
        }
        let trials = raw.trials.unwrap_or(1000);
        if trials == 0 {
            return invalid("trials must be at least 1".into());
        }
        let delta = raw.delta.unwrap_or(0.1);
        if !(delta > 0.0 && delta < 1.0) {
            return invalid(format!("delta {delta} outside (0, 1)"));
        }
        let budget = raw.budget.unwrap_or(1_000_000);
        if budget == 0 {
            return invalid("budget must be at least 1".into());
        }
        if let Some(x) = &raw.x_star {
            if x.len() != raw.dimension {
                return invalid(format!(
                    "x_star has {} coordinates but dimension is {}",
                    x.len(),
                    raw.dimension
                ));
            }
            let build_err = match problem {
                ProblemKind::Sphere => SphereProblem::new(x.clone()).err(),
                ProblemKind::Spike => SpikeProblem::new(x.clone()).err(),
            };
            if let Some(e) = build_err {
                return invalid(format!("x_star rejected: {e}"));
            }
        }
        let learner = match raw.learner.as_deref() {
            None => None,
            Some("enclosing") => Some(LearnerChoice::EnclosingBall),
            Some("oneside") => Some(LearnerChoice::OneSideBall),
            Some(other) => {
                return invalid(format!(
                    "learner {other:?} unknown; expected \"enclosing\" or \"oneside\""
                ))
            }
        };
        if algorithm == Algorithm::Uniform {
            for (set, key) in [
                (raw.m0.is_some(), "m0"),
                (raw.mt.is_some(), "mt"),
                (raw.lambda.is_some(), "lambda"),
                (learner.is_some(), "learner"),
            ] {
                if set {
                    return invalid(format!("{key} has no effect with algorithm = \"uniform\""));
                }
            }
        }
        if let Some(l) = raw.lambda {
            if !(0.0..=1.0).contains(&l) {
                return invalid(format!("lambda {l} outside [0, 1]"));
            }
        }
        if raw.m0 == Some(0) {
            return invalid("m0 must be at least 1".into());
        }
        if raw.mt == Some(0) {
            return invalid("mt must be at least 1".into());
        }
        let diag_runs = raw.diag_runs.unwrap_or(10);
        if diag_runs == 0 {
            return invalid("diag_runs must be at least 1".into());
        }
        let mc_samples = raw.mc_samples.unwrap_or(100_000);
        if mc_samples == 0 {
            return invalid("mc_samples must be at least 1".into());
        }

        Ok(ExperimentConfig {
            problem,
            dimension: raw.dimension,
            algorithm,
            alpha_star: raw.alpha_star,
            trials,
            delta,
            budget,
            seed: raw.seed.unwrap_or(0),
            workers: raw.workers.unwrap_or(0),
            out: raw.out.map(PathBuf::from),
            x_star: raw.x_star,
            m0: raw.m0,
            mt: raw.mt,
            lambda: raw.lambda,
            learner,
            diag_runs,
            mc_samples,
        })
    }

    /// Builds the problem instance for one trial.
    ///
    /// With an explicit `x_star` the same instance is used everywhere;
    /// otherwise the optimum is drawn from `rng`, so it must be called
    /// with the trial's own stream before any search randomness.
    pub fn build_problem<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
    ) -> Result<Box<dyn Problem>, ProblemError> {
        Ok(match (self.problem, &self.x_star) {
            (ProblemKind::Sphere, Some(x)) => Box::new(SphereProblem::new(x.clone())?),
            (ProblemKind::Sphere, None) => Box::new(SphereProblem::seeded(self.dimension, rng)?),
            (ProblemKind::Spike, Some(x)) => Box::new(SpikeProblem::new(x.clone())?),
            (ProblemKind::Spike, None) => Box::new(SpikeProblem::seeded(self.dimension, rng)?),
        })
    }

    /// Builds the sphere instance for one trial; the condition checks
    /// need the concrete type for its sublevel geometry.
    pub fn build_sphere<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
    ) -> Result<SphereProblem, ProblemError> {
        match &self.x_star {
            Some(x) => SphereProblem::new(x.clone()),
            None => SphereProblem::seeded(self.dimension, rng),
        }
    }

    /// The optimizer configuration for one target level, or `None` for
    /// uniform search.
    pub fn sac_config(&self, alpha_star: f64) -> Option<SacConfig> {
        let preset = match self.algorithm {
            Algorithm::Uniform => return None,
            Algorithm::Sac1 => SchedulePreset::Enclosing,
            Algorithm::Sac2 => SchedulePreset::OneSide,
        };
        let mut cfg = default_schedule(alpha_star, self.dimension, preset);
        cfg.delta = self.delta;
        if let Some(m0) = self.m0 {
            cfg.m0 = m0;
        }
        if let Some(mt) = self.mt {
            cfg.batch_sizes = vec![mt; cfg.schedule.len()];
        }
        if let Some(lambda) = self.lambda {
            cfg.lambda = lambda;
        }
        if let Some(learner) = self.learner {
            cfg.learner = learner;
        }
        Some(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const MINIMAL: &str = r#"
problem = "sphere"
dimension = 2
algorithm = "uniform"
alpha_star = [0.0625]
"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = ExperimentConfig::parse(MINIMAL).unwrap();
        assert_eq!(cfg.problem, ProblemKind::Sphere);
        assert_eq!(cfg.dimension, 2);
        assert_eq!(cfg.algorithm, Algorithm::Uniform);
        assert_eq!(cfg.alpha_star, vec![0.0625]);
        assert_eq!(cfg.trials, 1000);
        assert_eq!(cfg.delta, 0.1);
        assert_eq!(cfg.budget, 1_000_000);
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.workers, 0);
        assert_eq!(cfg.out, None);
        assert_eq!(cfg.x_star, None);
        assert_eq!(cfg.diag_runs, 10);
        assert_eq!(cfg.mc_samples, 100_000);
        assert!(cfg.sac_config(0.0625).is_none());
    }

    #[test]
    fn full_config_round_trips_values() {
        let text = r#"
problem = "spike"
dimension = 3
algorithm = "sac2"
alpha_star = [0.25, 0.125]
trials = 64
delta = 0.05
budget = 5000
seed = 7
workers = 2
out = "reports"
x_star = [0.1, -0.2, 0.0]
m0 = 11
mt = 90
lambda = 0.25
learner = "enclosing"
diag_runs = 3
mc_samples = 1234
"#;
        let cfg = ExperimentConfig::parse(text).unwrap();
        assert_eq!(cfg.problem, ProblemKind::Spike);
        assert_eq!(cfg.algorithm, Algorithm::Sac2);
        assert_eq!(cfg.trials, 64);
        assert_eq!(cfg.delta, 0.05);
        assert_eq!(cfg.budget, 5000);
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.workers, 2);
        assert_eq!(cfg.out, Some(PathBuf::from("reports")));
        assert_eq!(cfg.x_star, Some(vec![0.1, -0.2, 0.0]));
        let sac = cfg.sac_config(0.25).unwrap();
        assert_eq!(sac.m0, 11);
        assert_eq!(sac.batch_sizes, vec![90, 90]);
        assert_eq!(sac.lambda, 0.25);
        assert_eq!(sac.learner, LearnerChoice::EnclosingBall);
        assert_eq!(sac.delta, 0.05);
    }

    #[test]
    fn unknown_keys_are_rejected_by_name() {
        let text = format!("{MINIMAL}\nbudgett = 100\n");
        match ExperimentConfig::parse(&text) {
            Err(ConfigError::Parse(msg)) => {
                assert!(msg.contains("budgett"), "message {msg:?} lacks the key name");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn invalid_values_are_rejected() {
        let bad = |patch: &str, needle: &str| {
            let text = format!(
                "problem = \"sphere\"\ndimension = 2\nalgorithm = \"sac1\"\n{patch}\n"
            );
            match ExperimentConfig::parse(&text) {
                Err(e) => {
                    let msg = e.to_string();
                    assert!(msg.contains(needle), "message {msg:?} lacks {needle:?}");
                }
                Ok(_) => panic!("config with {patch:?} must not validate"),
            }
        };
        bad("alpha_star = []", "at least one");
        bad("alpha_star = [1.5]", "outside (0, 1)");
        bad("alpha_star = [0.5, 0.5]", "twice");
        bad("alpha_star = [0.5]\ntrials = 0", "trials");
        bad("alpha_star = [0.5]\ndelta = 1.0", "delta");
        bad("alpha_star = [0.5]\nbudget = 0", "budget");
        bad("alpha_star = [0.5]\nx_star = [0.5]", "coordinates");
        bad("alpha_star = [0.5]\nx_star = [1.5, 0.5]", "x_star");
        bad("alpha_star = [0.5]\nlambda = -0.1", "lambda");
        bad("alpha_star = [0.5]\nlearner = \"svm\"", "learner");
        bad("alpha_star = [0.5]\nmt = 0", "mt");
        bad("alpha_star = [0.5]\ndiag_runs = 0", "diag_runs");
        bad("alpha_star = [0.5]\nmc_samples = 0", "mc_samples");

        let text = "problem = \"box\"\ndimension = 2\nalgorithm = \"sac1\"\nalpha_star = [0.5]\n";
        assert!(matches!(
            ExperimentConfig::parse(text),
            Err(ConfigError::Invalid(_))
        ));
        let text =
            "problem = \"sphere\"\ndimension = 2\nalgorithm = \"anneal\"\nalpha_star = [0.5]\n";
        assert!(ExperimentConfig::parse(text).is_err());
    }

    #[test]
    fn uniform_rejects_optimizer_overrides() {
        let text = format!("{MINIMAL}\nmt = 50\n");
        match ExperimentConfig::parse(&text) {
            Err(ConfigError::Invalid(msg)) => assert!(msg.contains("no effect")),
            other => panic!("expected invalid-config error, got {other:?}"),
        }
        let text = format!("{MINIMAL}\nlambda = 0.5\n");
        assert!(ExperimentConfig::parse(&text).is_err());
    }

    #[test]
    fn spike_x_star_uses_centered_box() {
        let text = r#"
problem = "spike"
dimension = 2
algorithm = "sac1"
alpha_star = [0.01]
x_star = [0.4, -0.4]
"#;
        assert!(ExperimentConfig::parse(text).is_ok());
        let text = r#"
problem = "spike"
dimension = 2
algorithm = "sac1"
alpha_star = [0.01]
x_star = [0.9, 0.0]
"#;
        assert!(ExperimentConfig::parse(text).is_err());
    }

    #[test]
    fn seeded_problem_construction_is_stream_deterministic() {
        let cfg = ExperimentConfig::parse(
            "problem = \"sphere\"\ndimension = 3\nalgorithm = \"uniform\"\nalpha_star = [0.5]\n",
        )
        .unwrap();
        let mut r1 = ChaCha8Rng::seed_from_u64(5);
        let mut r2 = ChaCha8Rng::seed_from_u64(5);
        let a = cfg.build_problem(&mut r1).unwrap();
        let b = cfg.build_problem(&mut r2).unwrap();
        let x = vec![0.2, 0.2, 0.2];
        assert_eq!(a.eval(&x).unwrap(), b.eval(&x).unwrap());
    }

    #[test]
    fn sac_presets_flow_through_config() {
        let text = r#"
problem = "sphere"
dimension = 2
algorithm = "sac1"
alpha_star = [0.0625]
"#;
        let cfg = ExperimentConfig::parse(text).unwrap();
        let sac = cfg.sac_config(0.0625).unwrap();
        assert_eq!(sac.schedule, vec![0.5, 0.25]);
        assert_eq!(sac.batch_sizes, vec![145, 145]);
        assert_eq!(sac.learner, LearnerChoice::EnclosingBall);
    }
}
