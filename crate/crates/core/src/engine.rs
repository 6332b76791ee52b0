//! The mixture-sampling optimization loop and its uniform baseline.
//!
//! [`run_sac`] alternates sampling and classification: an initial uniform
//! batch seeds the first hypothesis; each iteration labels the previous
//! batch against its threshold, fits a ball over the positives, then draws
//! the next batch from a `lambda`-mixture of that ball (clipped to the
//! box) and the uniform law. Every objective evaluation is counted exactly
//! once, the running best is recorded after every query, and the first
//! query at or below the target is remembered. [`run_uniform`] is the
//! pure-uniform reference with identical accounting.
//!
//! Degenerate situations keep the run going instead of failing: an
//! iteration with no positive samples (or a mixture weight of zero) draws
//! uniformly, and region draws from a zero-radius ball or an exhausted
//! rejection loop fall back to single uniform draws, counted in the
//! iteration diagnostics.

use rand::Rng;
use thiserror::Error;

use crate::geometry::{sample_in_ball_clipped, Ball, DEFAULT_MAX_REJECTS};
use crate::learners::{
    label_samples, training_error, EnclosingBallLearner, Label, LearnError, Learner,
    OneSideBallLearner, Sample, SphereHypothesis,
};
use crate::problems::{Problem, ProblemError};
use crate::theory::{ball_class_vc_dim, sample_size_for_error};

/// Errors from configuring or driving the optimizer.
#[derive(Debug, Error)]
pub enum EngineError {
    /// The configuration violates a structural requirement.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    /// The objective rejected a point (only possible with a broken
    /// sampler or problem, since all drawn points stay in the box).
    #[error("objective evaluation failed: {0}")]
    Objective(#[from] ProblemError),
    /// Learning failed for a reason other than an all-negative batch.
    #[error("learning failed: {0}")]
    Learning(#[from] LearnError),
}

/// Which hypothesis learner the optimizer uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LearnerChoice {
    /// Minimum enclosing ball of the positives.
    EnclosingBall,
    /// Enclosing ball shrunk to exclude all negatives.
    OneSideBall,
}

impl LearnerChoice {
    /// Instantiates the chosen learner with its defaults.
    pub fn build(&self) -> Box<dyn Learner> {
        match self {
            LearnerChoice::EnclosingBall => Box::new(EnclosingBallLearner::default()),
            LearnerChoice::OneSideBall => Box::new(OneSideBallLearner::default()),
        }
    }
}

/// Full specification of one optimizer run.
#[derive(Debug, Clone, PartialEq)]
pub struct SacConfig {
    /// Target objective level: a query at or below it is a hit.
    pub alpha_star: f64,
    /// Per-iteration labeling thresholds, strictly decreasing.
    pub schedule: Vec<f64>,
    /// Size of the uniform initialization batch.
    pub m0: usize,
    /// Per-iteration batch sizes, one per schedule entry.
    pub batch_sizes: Vec<usize>,
    /// Probability that a post-initialization draw comes from the
    /// learned region rather than the uniform law.
    pub lambda: f64,
    /// Hypothesis learner.
    pub learner: LearnerChoice,
    /// Failure level carried for reporting and bound evaluation.
    pub delta: f64,
    /// Learning confidence level carried for bound evaluation.
    pub eta: f64,
    /// Cap on rejection attempts per region draw before falling back to
    /// a uniform draw.
    pub max_rejects: u32,
}

impl SacConfig {
    /// Number of learning iterations.
    pub fn iterations(&self) -> usize {
        self.schedule.len()
    }

    /// Total queries of a completion run: `m0` plus all batch sizes.
    pub fn total_queries(&self) -> u64 {
        self.m0 as u64 + self.batch_sizes.iter().map(|&m| m as u64).sum::<u64>()
    }

    /// Checks every structural requirement, reporting the first failure.
    pub fn validate(&self) -> Result<(), EngineError> {
        let fail = |msg: String| Err(EngineError::InvalidConfig(msg));
        if !(self.alpha_star > 0.0 && self.alpha_star < 1.0) {
            return fail(format!("target level {} outside (0, 1)", self.alpha_star));
        }
        if self.m0 == 0 {
            return fail("initialization batch must contain at least one query".into());
        }
        if self.schedule.len() != self.batch_sizes.len() {
            return fail(format!(
                "{} thresholds but {} batch sizes",
                self.schedule.len(),
                self.batch_sizes.len()
            ));
        }
        for (t, &a) in self.schedule.iter().enumerate() {
            if !(a > 0.0 && a < 1.0) {
                return fail(format!("threshold {a} at iteration {} outside (0, 1)", t + 1));
            }
            if t > 0 && a >= self.schedule[t - 1] {
                return fail(format!(
                    "thresholds must strictly decrease, but {} >= {} at iteration {}",
                    a,
                    self.schedule[t - 1],
                    t + 1
                ));
            }
        }
        if self.batch_sizes.iter().any(|&m| m == 0) {
            return fail("every iteration batch needs at least one query".into());
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return fail(format!("mixture weight {} outside [0, 1]", self.lambda));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return fail(format!("failure level {} outside (0, 1)", self.delta));
        }
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return fail(format!("confidence level {} outside (0, 1)", self.eta));
        }
        if self.max_rejects == 0 {
            return fail("rejection cap must allow at least one attempt".into());
        }
        Ok(())
    }
}

/// Built-in schedule presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchedulePreset {
    /// Enclosing-ball learner, halving thresholds down to roughly
    /// `sqrt(alpha_star)`, even region/uniform mixture, batch sizes from
    /// inverting the zero-error learning bound at `2^-T`.
    Enclosing,
    /// One-side learner, halving thresholds down to roughly `alpha_star`,
    /// one third of draws from the region, constant batch sizes from
    /// inverting the zero-error learning bound at `1/2`.
    OneSide,
}

/// Default size of the uniform initialization batch.
pub const DEFAULT_M0: usize = 100;

/// Builds the default configuration of a preset for a given target level
/// and dimension.
///
/// Both presets use thresholds `2^-t`. The enclosing preset runs
/// `ceil(log2(1 / sqrt(alpha_star)))` iterations with batch sizes sized
/// for learning error `2^-T`; the one-side preset runs
/// `ceil(log2(1 / alpha_star))` iterations with batch sizes sized for
/// learning error `1/2`. Defaults: `m0 = 100`, `delta = 0.1`,
/// `eta = 0.5`.
pub fn default_schedule(alpha_star: f64, n: usize, preset: SchedulePreset) -> SacConfig {
    assert!(
        alpha_star > 0.0 && alpha_star < 1.0,
        "target level {alpha_star} outside (0, 1)"
    );
    assert!(n >= 1, "dimension must be at least 1");
    let d = ball_class_vc_dim(n);
    let eta = 0.5;
    let (iterations, target_error, lambda, learner) = match preset {
        SchedulePreset::Enclosing => {
            let t = ((1.0 / alpha_star).log2() / 2.0).ceil().max(1.0) as u32;
            (t, 0.5f64.powi(t as i32), 0.5, LearnerChoice::EnclosingBall)
        }
        SchedulePreset::OneSide => {
            let t = (1.0 / alpha_star).log2().ceil().max(1.0) as u32;
            (t, 0.5, 1.0 / 3.0, LearnerChoice::OneSideBall)
        }
    };
    let m = sample_size_for_error(target_error, d, eta) as usize;
    let schedule: Vec<f64> = (1..=iterations).map(|t| 0.5f64.powi(t as i32)).collect();
    let batch_sizes = vec![m; iterations as usize];
    SacConfig {
        alpha_star,
        schedule,
        m0: DEFAULT_M0,
        batch_sizes,
        lambda,
        learner,
        delta: 0.1,
        eta,
        max_rejects: DEFAULT_MAX_REJECTS,
    }
}

/// Per-iteration diagnostics of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationDiagnostics {
    /// Iteration number, starting at 1.
    pub iteration: usize,
    /// Labeling threshold of the iteration.
    pub alpha: f64,
    /// The fitted hypothesis, absent when the batch had no positives or
    /// the mixture weight is zero.
    pub hypothesis: Option<SphereHypothesis>,
    /// Training error of the hypothesis on its batch.
    pub train_error: Option<f64>,
    /// Positive labels in the batch the hypothesis was fit on.
    pub positives: usize,
    /// Region draws that fell back to uniform (rejection cap exhausted or
    /// zero-radius ball).
    pub fallback_draws: u64,
    /// Whether the whole iteration sampled uniformly (no usable
    /// hypothesis or zero mixture weight).
    pub uniform_only: bool,
    /// Queries actually spent in this iteration (less than the scheduled
    /// batch size only when the run stopped on a hit).
    pub queries: u64,
}

/// Everything observed during one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    /// Best objective value after each query; length equals
    /// `total_queries`.
    pub best_trace: Vec<f64>,
    /// Location of the best value seen.
    pub best_point: Vec<f64>,
    /// Best objective value seen.
    pub best_value: f64,
    /// 1-based index of the first query at or below the target level.
    pub first_hit: Option<u64>,
    /// Total objective evaluations spent.
    pub total_queries: u64,
    /// The target level the run was accounted against.
    pub alpha_star: f64,
    /// Diagnostics for every iteration that started.
    pub iterations: Vec<IterationDiagnostics>,
}

struct Progress {
    best_trace: Vec<f64>,
    best_point: Vec<f64>,
    best_value: f64,
    first_hit: Option<u64>,
    queries: u64,
    alpha_star: f64,
}

impl Progress {
    fn new(alpha_star: f64, capacity: u64) -> Self {
        Self {
            best_trace: Vec::with_capacity(capacity as usize),
            best_point: Vec::new(),
            best_value: f64::INFINITY,
            first_hit: None,
            queries: 0,
            alpha_star,
        }
    }

    /// Accounts one query; returns whether it was the first hit.
    fn observe(&mut self, x: &[f64], y: f64) -> bool {
        self.queries += 1;
        if y < self.best_value {
            self.best_value = y;
            self.best_point = x.to_vec();
        }
        self.best_trace.push(self.best_value);
        if self.first_hit.is_none() && y <= self.alpha_star {
            self.first_hit = Some(self.queries);
            true
        } else {
            false
        }
    }

    fn finish(self, iterations: Vec<IterationDiagnostics>) -> RunResult {
        RunResult {
            best_trace: self.best_trace,
            best_point: self.best_point,
            best_value: self.best_value,
            first_hit: self.first_hit,
            total_queries: self.queries,
            alpha_star: self.alpha_star,
            iterations,
        }
    }
}

/// Runs the mixture optimizer with the learner named in the config.
///
/// With `stop_on_hit` the run returns right after the first query at or
/// below the target level (for first-hit measurements); otherwise it
/// spends the full schedule (for diagnostics, which are authoritative
/// only in completion mode).
pub fn run_sac<R: Rng + ?Sized>(
    problem: &dyn Problem,
    cfg: &SacConfig,
    rng: &mut R,
    stop_on_hit: bool,
) -> Result<RunResult, EngineError> {
    let learner = cfg.learner.build();
    run_sac_with_learner(problem, cfg, learner.as_ref(), rng, stop_on_hit)
}

/// [`run_sac`] with an externally supplied learner implementation.
pub fn run_sac_with_learner<R: Rng + ?Sized>(
    problem: &dyn Problem,
    cfg: &SacConfig,
    learner: &dyn Learner,
    rng: &mut R,
    stop_on_hit: bool,
) -> Result<RunResult, EngineError> {
    cfg.validate()?;
    let bounds = problem.bounds();
    let mut progress = Progress::new(cfg.alpha_star, cfg.total_queries());
    let mut previous_batch: Vec<Sample> = Vec::with_capacity(cfg.m0);

    for _ in 0..cfg.m0 {
        let x = bounds.sample(rng);
        let y = problem.eval(&x)?;
        let hit = progress.observe(&x, y);
        previous_batch.push(Sample { x, y });
        if hit && stop_on_hit {
            return Ok(progress.finish(Vec::new()));
        }
    }

    let mut diagnostics = Vec::with_capacity(cfg.schedule.len());
    for (t, (&alpha_t, &batch_size)) in cfg.schedule.iter().zip(&cfg.batch_sizes).enumerate() {
        let labeled = label_samples(&previous_batch, alpha_t);
        let positives = labeled.iter().filter(|s| s.label == Label::Positive).count();
        let mut hypothesis = None;
        let mut train_error_value = None;
        // With a zero mixture weight the region is never sampled; skip
        // fitting so the run consumes randomness exactly like uniform
        // search.
        if cfg.lambda > 0.0 {
            match learner.fit(&labeled) {
                Ok(mut h) => {
                    h.iteration = t + 1;
                    train_error_value = Some(training_error(&h, &labeled));
                    hypothesis = Some(h);
                }
                Err(LearnError::NoPositives) => {}
                Err(e) => return Err(e.into()),
            }
        }
        let region_ball: Option<Ball> = hypothesis.as_ref().map(|h| h.ball.clone());
        let uniform_only = region_ball.is_none();
        let mut fallback_draws = 0u64;
        let mut iteration_queries = 0u64;
        let mut batch = Vec::with_capacity(batch_size);
        for _ in 0..batch_size {
            let x = match &region_ball {
                None => bounds.sample(rng),
                Some(ball) => {
                    let from_region = cfg.lambda >= 1.0 || rng.random_bool(cfg.lambda);
                    if from_region {
                        let drawn = if ball.radius > 0.0 {
                            sample_in_ball_clipped(ball, bounds, rng, cfg.max_rejects)
                        } else {
                            // A point hypothesis carries no volume to
                            // sample; treat the draw as a fallback.
                            None
                        };
                        match drawn {
                            Some(x) => x,
                            None => {
                                fallback_draws += 1;
                                bounds.sample(rng)
                            }
                        }
                    } else {
                        bounds.sample(rng)
                    }
                }
            };
            let y = problem.eval(&x)?;
            let hit = progress.observe(&x, y);
            iteration_queries += 1;
            batch.push(Sample { x, y });
            if hit && stop_on_hit {
                diagnostics.push(IterationDiagnostics {
                    iteration: t + 1,
                    alpha: alpha_t,
                    hypothesis,
                    train_error: train_error_value,
                    positives,
                    fallback_draws,
                    uniform_only,
                    queries: iteration_queries,
                });
                return Ok(progress.finish(diagnostics));
            }
        }
        diagnostics.push(IterationDiagnostics {
            iteration: t + 1,
            alpha: alpha_t,
            hypothesis,
            train_error: train_error_value,
            positives,
            fallback_draws,
            uniform_only,
            queries: iteration_queries,
        });
        previous_batch = batch;
    }
    Ok(progress.finish(diagnostics))
}

/// Pure uniform search with the same accounting as [`run_sac`].
pub fn run_uniform<R: Rng + ?Sized>(
    problem: &dyn Problem,
    budget: u64,
    alpha_star: f64,
    rng: &mut R,
    stop_on_hit: bool,
) -> Result<RunResult, EngineError> {
    if !(alpha_star > 0.0 && alpha_star < 1.0) {
        return Err(EngineError::InvalidConfig(format!(
            "target level {alpha_star} outside (0, 1)"
        )));
    }
    if budget == 0 {
        return Err(EngineError::InvalidConfig(
            "uniform search needs a positive budget".into(),
        ));
    }
    let bounds = problem.bounds();
    let mut progress = Progress::new(alpha_star, budget);
    for _ in 0..budget {
        let x = bounds.sample(rng);
        let y = problem.eval(&x)?;
        let hit = progress.observe(&x, y);
        if hit && stop_on_hit {
            break;
        }
    }
    Ok(progress.finish(Vec::new()))
}
