//! Experiment driving: per-trial runs, first-hit quantile estimation,
//! scaling sweeps, and sampler-condition reports.
//!
//! Every trial derives its own random stream from the master seed, so
//! results are byte-identical across repeat invocations and worker
//! counts. Monte Carlo measure estimates and bootstrap resampling use
//! separately tagged streams that can never collide with trial streams.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::engine::{run_sac, run_uniform, EngineError};
use crate::geometry::{check_error_target_independence, check_one_side_error, mc_volume};
use crate::harness::config::{Algorithm, ConfigError, ExperimentConfig, ProblemKind};
use crate::problems::{Problem, ProblemError, SphereProblem};
use crate::theory::{uniform_first_hit_quantile, UniformComplexity};

/// Errors from running an experiment.
#[derive(Debug, Error)]
pub enum HarnessError {
    /// The configuration is unusable for the requested operation.
    #[error(transparent)]
    Config(#[from] ConfigError),
    /// A trial run failed.
    #[error(transparent)]
    Engine(#[from] EngineError),
    /// A problem instance could not be built.
    #[error(transparent)]
    Problem(#[from] ProblemError),
    /// The worker pool could not be created.
    #[error("worker pool: {0}")]
    Pool(String),
}

/// Bits reserved for the trial index inside a stream id.
const TRIAL_BITS: u32 = 40;
/// Stream tag for Monte Carlo measure estimation.
const MC_TAG: u64 = 1 << 50;
/// Stream tag for bootstrap resampling.
const BOOTSTRAP_TAG: u64 = 1 << 51;

/// Bootstrap resamples behind every slope confidence interval.
pub const BOOTSTRAP_RESAMPLES: u32 = 200;

/// Stream id of one trial: level index and trial index packed into
/// disjoint bit ranges so no two trials share a stream.
pub fn trial_stream(level_index: usize, trial: u64) -> u64 {
    assert!(trial < 1 << TRIAL_BITS, "trial index {trial} too large");
    assert!(level_index < 1 << 10, "level index {level_index} too large");
    ((level_index as u64) << TRIAL_BITS) | trial
}

/// The dedicated generator of one trial.
pub fn trial_rng(master_seed: u64, level_index: usize, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial_stream(level_index, trial));
    rng
}

/// Outcome of one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    /// Algorithm that ran.
    pub algorithm: Algorithm,
    /// Target level of the trial.
    pub alpha_star: f64,
    /// Trial index within its level.
    pub trial: u64,
    /// Stream id the trial's randomness came from.
    pub stream: u64,
    /// 1-based query index of the first hit, when one landed inside the
    /// censoring horizon.
    pub first_hit: Option<u64>,
    /// Censoring horizon: the query budget, or the full schedule length
    /// if shorter.
    pub censor_at: u64,
}

impl TrialRecord {
    /// Whether the trial ended without a hit inside the horizon.
    pub fn censored(&self) -> bool {
        self.first_hit.is_none()
    }
}

/// Runs a single trial of the configured experiment.
///
/// The trial's stream first seeds the problem instance (when the
/// optimum is drawn rather than fixed) and then drives the search, so
/// two algorithms run from the same seed face the same instance.
pub fn run_one_trial(
    cfg: &ExperimentConfig,
    level_index: usize,
    trial: u64,
) -> Result<TrialRecord, HarnessError> {
    let alpha = cfg.alpha_star[level_index];
    let mut rng = trial_rng(cfg.seed, level_index, trial);
    let problem = cfg.build_problem(&mut rng)?;
    let (result, censor_at) = match cfg.sac_config(alpha) {
        None => {
            let r = run_uniform(problem.as_ref(), cfg.budget, alpha, &mut rng, true)?;
            (r, cfg.budget)
        }
        Some(sac) => {
            let censor = sac.total_queries().min(cfg.budget);
            let r = run_sac(problem.as_ref(), &sac, &mut rng, true)?;
            (r, censor)
        }
    };
    Ok(TrialRecord {
        algorithm: cfg.algorithm,
        alpha_star: alpha,
        trial,
        stream: trial_stream(level_index, trial),
        first_hit: result.first_hit.filter(|&h| h <= censor_at),
        censor_at,
    })
}

/// Order statistic of first-hit counts at one target level.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantileEstimate {
    /// Algorithm the trials ran.
    pub algorithm: Algorithm,
    /// Target level.
    pub alpha_star: f64,
    /// Number of trials.
    pub trials: u64,
    /// Trials that hit inside the horizon.
    pub hits: u64,
    /// Trials censored at the horizon.
    pub censored: u64,
    /// The common censoring horizon.
    pub censor_at: u64,
    /// Rank of the reported order statistic.
    pub quantile_rank: u64,
    /// The order statistic itself; `None` when censoring left fewer
    /// hits than the rank, making the estimate unattainable.
    pub quantile: Option<u64>,
    /// Fraction of trials that hit.
    pub hit_fraction: f64,
    /// Whether the trial count is below `1/delta`, too small to resolve
    /// the requested failure level.
    pub small_sample: bool,
    /// Closed-form reference `ln(1/delta) / hit-rate`, when available.
    pub theory_ln_form: Option<f64>,
    /// Exact geometric reference quantile, when available.
    pub theory_exact: Option<u64>,
}

/// Rank of the reported order statistic: `ceil((1 - delta) * trials)`,
/// clamped into `[1, trials]`.
pub fn quantile_rank(trials: u64, delta: f64) -> u64 {
    (((1.0 - delta) * trials as f64).ceil() as u64).clamp(1, trials)
}

/// Summarizes one level's trial records into a quantile estimate.
///
/// Censored trials count as larger than every observed hit, so the
/// estimate is `None` whenever censoring reaches past the rank.
pub fn estimate_quantile(records: &[TrialRecord], delta: f64) -> QuantileEstimate {
    assert!(!records.is_empty(), "need at least one trial record");
    let trials = records.len() as u64;
    let mut first_hits: Vec<u64> = records.iter().filter_map(|r| r.first_hit).collect();
    first_hits.sort_unstable();
    let hits = first_hits.len() as u64;
    let rank = quantile_rank(trials, delta);
    let quantile = if hits >= rank {
        Some(first_hits[(rank - 1) as usize])
    } else {
        None
    };
    QuantileEstimate {
        algorithm: records[0].algorithm,
        alpha_star: records[0].alpha_star,
        trials,
        hits,
        censored: trials - hits,
        censor_at: records[0].censor_at,
        quantile_rank: rank,
        quantile,
        hit_fraction: hits as f64 / trials as f64,
        small_sample: (trials as f64) < 1.0 / delta,
        theory_ln_form: None,
        theory_exact: None,
    }
}

/// Closed-form uniform-search reference quantile for a config, when one
/// exists: sphere problem, explicit optimum, and a sublevel ball the
/// box does not clip.
pub fn uniform_theory(cfg: &ExperimentConfig, alpha_star: f64) -> Option<(f64, u64)> {
    if cfg.problem != ProblemKind::Sphere {
        return None;
    }
    let x = cfg.x_star.as_ref()?;
    let sphere = SphereProblem::new(x.clone()).ok()?;
    let pr = sphere.sublevel_measure_exact(alpha_star)?;
    match uniform_first_hit_quantile(pr, cfg.delta) {
        UniformComplexity::Finite {
            ln_form,
            exact_quantile,
        } => Some((ln_form, exact_quantile)),
        UniformComplexity::Infinite => None,
    }
}

/// A complete experiment: every trial record plus one estimate per
/// target level, in config order.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRun {
    /// The configuration that produced the run.
    pub config: ExperimentConfig,
    /// One estimate per target level.
    pub estimates: Vec<QuantileEstimate>,
    /// All trial records, level-major then trial order.
    pub trials: Vec<TrialRecord>,
}

/// Runs the configured trials and estimates the first-hit quantile at
/// every target level.
///
/// Trials run in parallel on a dedicated pool but collect in index
/// order, so output is independent of the worker count.
pub fn estimate_quantiles(cfg: &ExperimentConfig) -> Result<ExperimentRun, HarnessError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| HarnessError::Pool(e.to_string()))?;
    let mut estimates = Vec::with_capacity(cfg.alpha_star.len());
    let mut trials = Vec::with_capacity(cfg.alpha_star.len() * cfg.trials as usize);
    for (li, &alpha) in cfg.alpha_star.iter().enumerate() {
        let records: Vec<TrialRecord> = pool.install(|| {
            (0..cfg.trials)
                .into_par_iter()
                .map(|t| run_one_trial(cfg, li, t))
                .collect::<Result<Vec<_>, HarnessError>>()
        })?;
        let mut est = estimate_quantile(&records, cfg.delta);
        if cfg.algorithm == Algorithm::Uniform {
            if let Some((ln_form, exact)) = uniform_theory(cfg, alpha) {
                est.theory_ln_form = Some(ln_form);
                est.theory_exact = Some(exact);
            }
        }
        estimates.push(est);
        trials.extend(records);
    }
    Ok(ExperimentRun {
        config: cfg.clone(),
        estimates,
        trials,
    })
}

/// Log-log scaling fit of quantile against inverse target level.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeReport {
    /// Algorithm the underlying run used.
    pub algorithm: Algorithm,
    /// `(target level, quantile)` pairs the fit used.
    pub points: Vec<(f64, u64)>,
    /// Target levels whose quantile was unattainable, excluded from
    /// the fit.
    pub gaps: Vec<f64>,
    /// Least-squares slope of `ln(quantile)` against `ln(1/level)`;
    /// `None` with fewer than two usable points.
    pub slope: Option<f64>,
    /// Fit intercept.
    pub intercept: Option<f64>,
    /// Lower end of the percentile-bootstrap 95% slope interval.
    pub ci_low: Option<f64>,
    /// Upper end of the percentile-bootstrap 95% slope interval.
    pub ci_high: Option<f64>,
    /// Resamples behind the interval.
    pub resamples: u32,
}

/// Least-squares fit of `ln(quantile)` on `ln(1/level)`.
///
/// Returns `(slope, intercept)`, or `None` with fewer than two points.
pub fn fit_loglog(points: &[(f64, u64)]) -> Option<(f64, f64)> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|&(a, _)| (1.0 / a).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, q)| (q as f64).ln()).collect();
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x) * (x - mean_x)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let slope = sxy / sxx;
    Some((slope, mean_y - slope * mean_x))
}

/// Fits the scaling slope of a finished run and brackets it with a
/// percentile bootstrap over trial records.
///
/// Each resample redraws every level's trials with replacement,
/// recomputes the quantiles, and refits; resamples that leave fewer
/// than two attainable levels contribute nothing.
pub fn scaling_sweep(run: &ExperimentRun) -> SlopeReport {
    let cfg = &run.config;
    let mut points = Vec::new();
    let mut gaps = Vec::new();
    for est in &run.estimates {
        match est.quantile {
            Some(q) => points.push((est.alpha_star, q)),
            None => gaps.push(est.alpha_star),
        }
    }
    let fit = fit_loglog(&points);
    let (slope, intercept) = (fit.map(|f| f.0), fit.map(|f| f.1));

    let mut ci_low = None;
    let mut ci_high = None;
    if slope.is_some() {
        let per_level: Vec<&[TrialRecord]> = run.trials.chunks(cfg.trials as usize).collect();
        let rank = quantile_rank(cfg.trials, cfg.delta);
        let mut slopes = Vec::with_capacity(BOOTSTRAP_RESAMPLES as usize);
        for b in 0..BOOTSTRAP_RESAMPLES {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(BOOTSTRAP_TAG | u64::from(b));
            let mut pts = Vec::new();
            for (li, &alpha) in cfg.alpha_star.iter().enumerate() {
                let recs = per_level[li];
                let mut hits: Vec<u64> = (0..recs.len())
                    .filter_map(|_| recs[rng.random_range(0..recs.len())].first_hit)
                    .collect();
                hits.sort_unstable();
                if hits.len() as u64 >= rank {
                    pts.push((alpha, hits[(rank - 1) as usize]));
                }
            }
            if let Some((s, _)) = fit_loglog(&pts) {
                slopes.push(s);
            }
        }
        if slopes.len() >= 2 {
            slopes.sort_by(f64::total_cmp);
            let idx = |q: f64| (((slopes.len() - 1) as f64) * q).round() as usize;
            ci_low = Some(slopes[idx(0.025)]);
            ci_high = Some(slopes[idx(0.975)]);
        }
    }

    SlopeReport {
        algorithm: cfg.algorithm,
        points,
        gaps,
        slope,
        intercept,
        ci_low,
        ci_high,
        resamples: BOOTSTRAP_RESAMPLES,
    }
}

/// Measured sampler conditions for one iteration of one completion run.
///
/// The Monte Carlo fields are meaningful only when `has_hypothesis` is
/// true; a uniform-only iteration claims no region, so its checks hold
/// vacuously and the fields are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionRow {
    /// Diagnostic run index, 0-based.
    pub run: usize,
    /// Iteration number, 1-based.
    pub iteration: usize,
    /// Labeling threshold of the iteration.
    pub alpha: f64,
    /// Whether the iteration fit a usable hypothesis.
    pub has_hypothesis: bool,
    /// Positive labels in the fitting batch.
    pub positives: usize,
    /// Region draws that fell back to uniform.
    pub fallback_draws: u64,
    /// Training error of the hypothesis on its batch.
    pub train_error: Option<f64>,
    /// Measure of target ∩ disagreement under the uniform law.
    pub independence_joint: f64,
    /// Product of the marginal measures.
    pub independence_product: f64,
    /// Normal z-score of joint minus product; near 0 when target
    /// membership is independent of hypothesis/level disagreement.
    pub independence_z: f64,
    /// Measure the hypothesis claims beyond the level region; near 0
    /// when the hypothesis errs on one side only.
    pub one_side_excess: f64,
    /// Standard error of `one_side_excess`.
    pub one_side_sigma: f64,
    /// Measure of the hypothesis region inside the box.
    pub hyp_measure: f64,
    /// Standard error of `hyp_measure`.
    pub hyp_sigma: f64,
    /// Measure of the level region.
    pub level_measure: f64,
    /// Standard error of `level_measure`; 0 when closed-form.
    pub level_sigma: f64,
}

/// Runs completion-mode diagnostics and measures the sampler conditions
/// at every iteration of every run.
///
/// Needs the sphere problem (its sublevel geometry is exact, so checks
/// spend no queries), a learning algorithm, and exactly one target
/// level. Runs execute in stop-free completion mode, where every
/// scheduled batch lands and the diagnostics describe the sampler
/// rather than a truncated prefix.
pub fn condition_report(cfg: &ExperimentConfig) -> Result<Vec<ConditionRow>, HarnessError> {
    if cfg.problem != ProblemKind::Sphere {
        return Err(ConfigError::Invalid(
            "condition checks need problem = \"sphere\" for exact sublevel geometry".into(),
        )
        .into());
    }
    if cfg.algorithm == Algorithm::Uniform {
        return Err(ConfigError::Invalid(
            "condition checks need a learning algorithm, not \"uniform\"".into(),
        )
        .into());
    }
    if cfg.alpha_star.len() != 1 {
        return Err(ConfigError::Invalid(format!(
            "condition checks need exactly one target level, got {}",
            cfg.alpha_star.len()
        ))
        .into());
    }
    let alpha_star = cfg.alpha_star[0];
    let sac = cfg.sac_config(alpha_star).expect("algorithm is not uniform");

    let mut rows = Vec::new();
    for run_idx in 0..cfg.diag_runs {
        let mut rng = trial_rng(cfg.seed, 0, run_idx as u64);
        let sphere = cfg.build_sphere(&mut rng)?;
        let result = run_sac(&sphere, &sac, &mut rng, false)?;
        for diag in &result.iterations {
            let mut mc_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            mc_rng.set_stream(MC_TAG | ((run_idx as u64) << 20) | diag.iteration as u64);
            let bounds = sphere.bounds().clone();
            let level = sphere.sublevel_measure(diag.alpha, cfg.mc_samples, &mut mc_rng);
            let mut row = ConditionRow {
                run: run_idx,
                iteration: diag.iteration,
                alpha: diag.alpha,
                has_hypothesis: diag.hypothesis.is_some(),
                positives: diag.positives,
                fallback_draws: diag.fallback_draws,
                train_error: diag.train_error,
                independence_joint: 0.0,
                independence_product: 0.0,
                independence_z: 0.0,
                one_side_excess: 0.0,
                one_side_sigma: 0.0,
                hyp_measure: 0.0,
                hyp_sigma: 0.0,
                level_measure: level.value(),
                level_sigma: level.std_err(),
            };
            if let Some(h) = &diag.hypothesis {
                let indep = check_error_target_independence(
                    |x| sphere.sublevel_contains(alpha_star, x),
                    |x| h.contains(x),
                    |x| sphere.sublevel_contains(diag.alpha, x),
                    &bounds,
                    cfg.mc_samples,
                    &mut mc_rng,
                );
                row.independence_joint = indep.joint;
                row.independence_product = indep.product;
                row.independence_z = indep.z_score;
                let one_side = check_one_side_error(
                    |x| sphere.sublevel_contains(diag.alpha, x),
                    |x| h.contains(x),
                    &bounds,
                    cfg.mc_samples,
                    &mut mc_rng,
                );
                row.one_side_excess = one_side.value;
                row.one_side_sigma = one_side.std_err;
                let hyp = mc_volume(|x| h.contains(x), &bounds, cfg.mc_samples, &mut mc_rng);
                row.hyp_measure = hyp.value;
                row.hyp_sigma = hyp.std_err;
            }
            rows.push(row);
        }
    }
    Ok(rows)
}
