//! Plain-text and CSV rendering of experiment results.
//!
//! All output is deterministic: numbers print through `Display` (which
//! round-trips `f64` exactly), rows follow config order, and nothing
//! time- or path-dependent is ever written, so repeat runs produce
//! byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use crate::harness::config::{Algorithm, ExperimentConfig, ProblemKind};
use crate::harness::driver::{uniform_theory, ConditionRow, ExperimentRun, SlopeReport};
use crate::problems::SphereProblem;
use crate::theory::{ball_class_vc_dim, mixture_kl_vs_uniform, mixture_query_bound, BoundValue};

fn opt<T: std::fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

/// CSV of every trial: `algorithm,alpha_star,trial,seed,first_hit,censored`.
pub fn trials_csv(run: &ExperimentRun) -> String {
    let mut out = String::from("algorithm,alpha_star,trial,seed,first_hit,censored\n");
    for rec in &run.trials {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            rec.algorithm.name(),
            rec.alpha_star,
            rec.trial,
            rec.stream,
            opt(&rec.first_hit),
            rec.censored(),
        );
    }
    out
}

/// CSV of per-level estimates plus, when present, one `slope` record
/// carrying the scaling fit. The `record` column tells the rows apart;
/// gap levels are semicolon-separated inside a single cell.
pub fn estimates_csv(run: &ExperimentRun, slope: Option<&SlopeReport>) -> String {
    let mut out = String::from(
        "record,algorithm,alpha_star,trials,hits,censored,censor_at,quantile_rank,quantile,\
         hit_fraction,small_sample,theory_ln_form,theory_exact,slope,intercept,ci_low,ci_high,\
         resamples,gaps\n",
    );
    for est in &run.estimates {
        let _ = writeln!(
            out,
            "estimate,{},{},{},{},{},{},{},{},{},{},{},{},,,,,,",
            est.algorithm.name(),
            est.alpha_star,
            est.trials,
            est.hits,
            est.censored,
            est.censor_at,
            est.quantile_rank,
            opt(&est.quantile),
            est.hit_fraction,
            est.small_sample,
            opt(&est.theory_ln_form),
            opt(&est.theory_exact),
        );
    }
    if let Some(rep) = slope {
        let gaps = rep
            .gaps
            .iter()
            .map(|g| g.to_string())
            .collect::<Vec<_>>()
            .join(";");
        let _ = writeln!(
            out,
            "slope,{},,,,,,,,,,,,{},{},{},{},{},{}",
            rep.algorithm.name(),
            opt(&rep.slope),
            opt(&rep.intercept),
            opt(&rep.ci_low),
            opt(&rep.ci_high),
            rep.resamples,
            gaps,
        );
    }
    out
}

/// CSV of sampler-condition rows from completion-mode diagnostics.
pub fn conditions_csv(rows: &[ConditionRow]) -> String {
    let mut out = String::from(
        "run,iteration,alpha,has_hypothesis,positives,fallback_draws,train_error,\
         independence_joint,independence_product,independence_z,one_side_excess,one_side_sigma,\
         hyp_measure,hyp_sigma,level_measure,level_sigma\n",
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.run,
            r.iteration,
            r.alpha,
            r.has_hypothesis,
            r.positives,
            r.fallback_draws,
            opt(&r.train_error),
            r.independence_joint,
            r.independence_product,
            r.independence_z,
            r.one_side_excess,
            r.one_side_sigma,
            r.hyp_measure,
            r.hyp_sigma,
            r.level_measure,
            r.level_sigma,
        );
    }
    out
}

fn problem_name(kind: ProblemKind) -> &'static str {
    match kind {
        ProblemKind::Sphere => "sphere",
        ProblemKind::Spike => "spike",
    }
}

/// Human-readable summary of a run: config echo, per-level estimates
/// against theory references, the scaling fit, and condition extremes.
pub fn render_summary(
    run: &ExperimentRun,
    slope: Option<&SlopeReport>,
    conditions: Option<&[ConditionRow]>,
) -> String {
    let cfg = &run.config;
    let mut out = String::new();
    let _ = writeln!(out, "experiment summary");
    let _ = writeln!(out, "==================");
    let _ = writeln!(
        out,
        "problem: {} (dimension {})",
        problem_name(cfg.problem),
        cfg.dimension
    );
    let _ = writeln!(out, "algorithm: {}", cfg.algorithm.name());
    let _ = writeln!(
        out,
        "trials per level: {}  delta: {}  budget: {}  seed: {}",
        cfg.trials, cfg.delta, cfg.budget, cfg.seed
    );
    match &cfg.x_star {
        Some(x) => {
            let coords = x
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(", ");
            let _ = writeln!(out, "optimum: fixed at [{coords}]");
        }
        None => {
            let _ = writeln!(out, "optimum: drawn uniformly per trial");
        }
    }
    let _ = writeln!(out);

    for est in &run.estimates {
        let _ = writeln!(out, "level {}:", est.alpha_star);
        match est.quantile {
            Some(q) => {
                let _ = writeln!(
                    out,
                    "  quantile {} (rank {} of {}), hits {}, censored {}, horizon {}",
                    q, est.quantile_rank, est.trials, est.hits, est.censored, est.censor_at
                );
            }
            None => {
                let _ = writeln!(
                    out,
                    "  quantile unattainable: {} hits cannot reach rank {} of {} (horizon {})",
                    est.hits, est.quantile_rank, est.trials, est.censor_at
                );
            }
        }
        if let (Some(lf), Some(ex)) = (est.theory_ln_form, est.theory_exact) {
            let _ = writeln!(out, "  theory reference: ln form {lf}, exact {ex}");
        }
        if est.small_sample {
            let _ = writeln!(
                out,
                "  warning: {} trials cannot resolve delta {}",
                est.trials, cfg.delta
            );
        }
    }

    if let Some(rep) = slope {
        let _ = writeln!(out);
        match rep.slope {
            Some(s) => {
                let ci = match (rep.ci_low, rep.ci_high) {
                    (Some(lo), Some(hi)) => {
                        format!(", 95% bootstrap CI [{lo}, {hi}] over {} resamples", rep.resamples)
                    }
                    _ => String::new(),
                };
                let _ = writeln!(
                    out,
                    "scaling fit over {} levels: slope {s}{ci}",
                    rep.points.len()
                );
            }
            None => {
                let _ = writeln!(
                    out,
                    "scaling fit: not enough attainable levels ({} usable)",
                    rep.points.len()
                );
            }
        }
        if !rep.gaps.is_empty() {
            let gaps = rep
                .gaps
                .iter()
                .map(|g| g.to_string())
                .collect::<Vec<_>>()
                .join(", ");
            let _ = writeln!(out, "levels without estimates: {gaps}");
        }
    }

    // Speedup against the closed-form uniform reference, at the
    // smallest level with both numbers.
    if cfg.algorithm != Algorithm::Uniform {
        let best = run
            .estimates
            .iter()
            .filter(|e| e.quantile.is_some())
            .min_by(|a, b| a.alpha_star.total_cmp(&b.alpha_star));
        if let Some(est) = best {
            if let Some((_, reference)) = uniform_theory(cfg, est.alpha_star) {
                let q = est.quantile.expect("filtered on Some");
                let ratio = reference as f64 / q as f64;
                let _ = writeln!(
                    out,
                    "speedup at level {}: uniform reference {} vs measured {} -> {ratio}x",
                    est.alpha_star, reference, q
                );
            }
        }
    }

    if let Some(rows) = conditions {
        let _ = writeln!(out);
        let runs = rows.iter().map(|r| r.run).max().map_or(0, |m| m + 1);
        let _ = writeln!(out, "conditions: {} rows over {} runs", rows.len(), runs);
        let with_hyp = rows.iter().filter(|r| r.has_hypothesis);
        if let Some(worst_z) = with_hyp
            .clone()
            .map(|r| r.independence_z.abs())
            .max_by(f64::total_cmp)
        {
            let _ = writeln!(out, "  max |independence z|: {worst_z}");
        }
        if let Some(worst) = with_hyp
            .clone()
            .max_by(|a, b| a.one_side_excess.total_cmp(&b.one_side_excess))
        {
            let _ = writeln!(
                out,
                "  max one-side excess: {} (sigma {})",
                worst.one_side_excess, worst.one_side_sigma
            );
        }
        let missing = rows.iter().filter(|r| !r.has_hypothesis).count();
        if missing > 0 {
            let _ = writeln!(out, "  iterations without a hypothesis: {missing}");
        }
    }

    out
}

fn bound_str(b: BoundValue) -> String {
    match b {
        BoundValue::Finite(v) => v.to_string(),
        BoundValue::Infinite => "infinite".into(),
    }
}

/// Renders the closed-form references the bound calculators give for a
/// config, one block per target level.
pub fn render_theory(cfg: &ExperimentConfig) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "theory references for {} on {} (dimension {})",
        cfg.algorithm.name(),
        problem_name(cfg.problem),
        cfg.dimension
    );
    let _ = writeln!(
        out,
        "hypothesis class dimension: {}",
        ball_class_vc_dim(cfg.dimension)
    );
    let exact_rate = |alpha: f64| -> Option<f64> {
        if cfg.problem != ProblemKind::Sphere {
            return None;
        }
        let x = cfg.x_star.clone()?;
        SphereProblem::new(x).ok()?.sublevel_measure_exact(alpha)
    };
    for &alpha in &cfg.alpha_star {
        let _ = writeln!(out);
        let _ = writeln!(out, "level {alpha}:");
        match exact_rate(alpha) {
            Some(pr) => {
                let _ = writeln!(out, "  uniform hit rate: {pr} (closed form)");
                match uniform_theory(cfg, alpha) {
                    Some((lf, ex)) => {
                        let _ = writeln!(out, "  uniform quantile: ln form {lf}, exact {ex}");
                    }
                    None => {
                        let _ = writeln!(out, "  uniform quantile: infinite (hit rate 0)");
                    }
                }
                if let Some(sac) = cfg.sac_config(alpha) {
                    let bad = mixture_query_bound(
                        pr,
                        pr,
                        sac.lambda,
                        sac.delta,
                        sac.m0 as u64,
                        sac.total_queries() - sac.m0 as u64,
                    );
                    let good = mixture_query_bound(
                        pr,
                        1.0,
                        sac.lambda,
                        sac.delta,
                        sac.m0 as u64,
                        sac.total_queries() - sac.m0 as u64,
                    );
                    let _ = writeln!(
                        out,
                        "  query bound if the region never helps: {}",
                        bound_str(bad)
                    );
                    let _ = writeln!(
                        out,
                        "  query bound with a perfect region: {}",
                        bound_str(good)
                    );
                    if pr > 0.0 {
                        let _ = writeln!(
                            out,
                            "  per-query KL from uniform at region = level measure: {}",
                            mixture_kl_vs_uniform(sac.lambda, pr)
                        );
                    }
                }
            }
            None => {
                let _ = writeln!(
                    out,
                    "  uniform hit rate: no closed form (clipped ball, drawn optimum, or spike)"
                );
            }
        }
        if let Some(sac) = cfg.sac_config(alpha) {
            let thresholds = sac
                .schedule
                .iter()
                .map(|a| a.to_string())
                .collect::<Vec<_>>()
                .join(", ");
            let batches = sac
                .batch_sizes
                .iter()
                .map(|m| m.to_string())
                .collect::<Vec<_>>()
                .join(", ");
            let _ = writeln!(
                out,
                "  schedule: {} iterations, m0 {}, lambda {}, total queries {}",
                sac.iterations(),
                sac.m0,
                sac.lambda,
                sac.total_queries()
            );
            let _ = writeln!(out, "  thresholds: [{thresholds}]");
            let _ = writeln!(out, "  batches: [{batches}]");
        }
    }
    out
}

/// Writes all reports into `dir` (created if missing) and returns the
/// paths written: `trials.csv`, `estimates.csv`, `conditions.csv` when
/// rows are given, and `summary.txt`.
pub fn write_reports(
    dir: &Path,
    run: &ExperimentRun,
    slope: Option<&SlopeReport>,
    conditions: Option<&[ConditionRow]>,
) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let files: Vec<(&str, String)> = {
        let mut f = vec![
            ("trials.csv", trials_csv(run)),
            ("estimates.csv", estimates_csv(run, slope)),
        ];
        if let Some(rows) = conditions {
            f.push(("conditions.csv", conditions_csv(rows)));
        }
        f.push(("summary.txt", render_summary(run, slope, conditions)));
        f
    };
    for (name, content) in files {
        let path = dir.join(name);
        fs::write(&path, content)?;
        written.push(path);
    }
    Ok(written)
}
