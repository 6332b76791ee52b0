//! Closed-form calculators for query-complexity and learning-error bounds.
//!
//! These functions evaluate the guarantees that go with the mixture
//! optimizer: how many queries suffice for a probability-`1 - delta` hit
//! ([`mixture_query_bound`]), how well a ball learned from one batch
//! generalizes under the uniform law ([`vc_bound`], [`symdiff_error_bound`],
//! [`mixture_to_uniform_error`]), and how often the learned-region sampler
//! hits the target set ([`region_hit_rate_bound`],
//! [`average_hit_rate_bound`]). All logarithms are natural.
//!
//! Degenerate inputs are signaled, never silently patched: a zero success
//! rate yields [`BoundValue::Infinite`], a distribution shift too large for
//! the error transfer yields [`TheoryError::UndefinedShiftBound`], and
//! clamped or vacuous bounds carry an explicit flag alongside the raw
//! value.

use thiserror::Error;

/// Errors from bound calculators on degenerate inputs.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TheoryError {
    /// The training-to-uniform error transfer needs `KL < 2`.
    #[error("distribution-shift error transfer undefined: KL divergence {0} >= 2")]
    UndefinedShiftBound(f64),
    /// A pure-region mixture leaves no uniform component to bound.
    #[error("mixture weight 1 leaves no uniform component")]
    DegenerateMixture,
    /// A hit rate over a region needs the region to have positive measure.
    #[error("region has zero measure")]
    EmptyRegion,
}

/// VC dimension of the class of balls in `n`-dimensional space.
pub const fn ball_class_vc_dim(n: usize) -> usize {
    n + 1
}

/// A bound that may be infinite (no finite guarantee exists).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundValue {
    /// Finite bound value.
    Finite(f64),
    /// No finite bound: the guaranteed success rate is zero.
    Infinite,
}

impl BoundValue {
    /// The finite value, if any.
    pub fn finite(&self) -> Option<f64> {
        match *self {
            BoundValue::Finite(v) => Some(v),
            BoundValue::Infinite => None,
        }
    }

    /// Whether no finite bound exists.
    pub fn is_infinite(&self) -> bool {
        matches!(self, BoundValue::Infinite)
    }
}

fn complexity_term(m: u64, d: usize, log_num: f64, eta: f64) -> f64 {
    let m = m as f64;
    let d = d as f64;
    d * (2.0 * std::f64::consts::E * m / d).ln() + (log_num / eta).ln()
}

fn vc_zero_raw(m: u64, d: usize, eta: f64) -> f64 {
    2.0 / m as f64 * complexity_term(m, d, 2.0, eta)
}

fn vc_general_raw(m: u64, d: usize, eta: f64, train_error: f64) -> f64 {
    train_error + (8.0 / m as f64 * complexity_term(m, d, 4.0, eta)).sqrt()
}

/// Confidence-`1 - eta` upper bound on the true error of a hypothesis
/// from a VC class of dimension `d`, fit on `m` samples with observed
/// training error `train_error`.
///
/// Uses the fast zero-error branch when the training error is exactly
/// zero, the general square-root branch otherwise, and clamps the result
/// into `[0, 1]` since it bounds a probability.
pub fn vc_bound(m: u64, d: usize, eta: f64, train_error: f64) -> f64 {
    assert!(m >= 1, "sample count must be positive");
    assert!(d >= 1, "VC dimension must be positive");
    assert!(eta > 0.0 && eta < 1.0, "confidence level {eta} outside (0, 1)");
    assert!(
        (0.0..=1.0).contains(&train_error),
        "training error {train_error} outside [0, 1]"
    );
    let raw = if train_error == 0.0 {
        vc_zero_raw(m, d, eta)
    } else {
        vc_general_raw(m, d, eta, train_error)
    };
    raw.clamp(0.0, 1.0)
}

/// Smallest sample count whose zero-error bound reaches `target`.
///
/// Searches `m >= d`, where the zero-error branch is positive and
/// strictly decreasing; returns `d` when even the smallest valid sample
/// count already meets the target.
pub fn sample_size_for_error(target: f64, d: usize, eta: f64) -> u64 {
    assert!(target > 0.0, "target error must be positive");
    assert!(d >= 1, "VC dimension must be positive");
    assert!(eta > 0.0 && eta < 1.0, "confidence level {eta} outside (0, 1)");
    let lo0 = d as u64;
    if vc_zero_raw(lo0, d, eta) <= target {
        return lo0;
    }
    let mut lo = lo0;
    let mut hi = lo0 * 2;
    while vc_zero_raw(hi, d, eta) > target {
        lo = hi;
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if vc_zero_raw(mid, d, eta) <= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Confidence-`1 - eta` bound on the uniform-law symmetric-difference
/// error of a hypothesis trained on `m` samples drawn from a distribution
/// whose KL divergence from the uniform law is `kl_train`.
///
/// Divides the general VC branch by `1 - sqrt(kl_train / 2)`; undefined
/// once `kl_train >= 2`, where the correction factor hits zero.
pub fn symdiff_error_bound(
    train_error: f64,
    d: usize,
    m: u64,
    eta: f64,
    kl_train: f64,
) -> Result<f64, TheoryError> {
    assert!(kl_train >= 0.0, "KL divergence {kl_train} must be non-negative");
    assert!(m >= 1, "sample count must be positive");
    if kl_train >= 2.0 {
        return Err(TheoryError::UndefinedShiftBound(kl_train));
    }
    Ok(vc_general_raw(m, d, eta, train_error) / (1.0 - (kl_train / 2.0).sqrt()))
}

/// Converts a mixture-law error bound into a uniform-law one by dividing
/// out the uniform component's weight `1 - lambda`.
pub fn mixture_to_uniform_error(eps_mixture: f64, lambda: f64) -> Result<f64, TheoryError> {
    assert!(eps_mixture >= 0.0, "error bound must be non-negative");
    assert!((0.0..=1.0).contains(&lambda), "mixture weight outside [0, 1]");
    if lambda >= 1.0 {
        return Err(TheoryError::DegenerateMixture);
    }
    Ok(eps_mixture / (1.0 - lambda))
}

/// Upper bound on the queries needed by the mixture optimizer to hit the
/// target with probability at least `1 - delta`.
///
/// `m0 + max(ln(1/delta) / ((1 - lambda) pr_u + lambda pr_h_bar),
/// m_total)`, where `pr_u` is the uniform hit rate, `pr_h_bar` the
/// average per-query hit rate of the learned-region sampler, and
/// `m_total` the scheduled post-initialization queries. When the mixture
/// rate is zero no finite bound exists.
pub fn mixture_query_bound(
    pr_u: f64,
    pr_h_bar: f64,
    lambda: f64,
    delta: f64,
    m0: u64,
    m_total: u64,
) -> BoundValue {
    assert!((0.0..=1.0).contains(&pr_u), "uniform hit rate outside [0, 1]");
    assert!(
        (0.0..=1.0).contains(&pr_h_bar),
        "region hit rate outside [0, 1]"
    );
    assert!((0.0..=1.0).contains(&lambda), "mixture weight outside [0, 1]");
    assert!(delta > 0.0 && delta < 1.0, "failure level {delta} outside (0, 1)");
    let rate = (1.0 - lambda) * pr_u + lambda * pr_h_bar;
    if rate <= 0.0 {
        return BoundValue::Infinite;
    }
    let ln_term = (1.0 / delta).ln() / rate;
    BoundValue::Finite(m0 as f64 + ln_term.max(m_total as f64))
}

/// Lower bound on a sampler's hit rate of the target inside one region.
///
/// `intersection / region_measure - intersection * sqrt(kl_sampler / 2)`:
/// the exact conditional rate corrected for how far the region sampler is
/// from uniform on the region. The bound is `vacuous` when the correction
/// eats the whole rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionHitBound {
    /// Uncorrected bound value (may be negative).
    pub raw: f64,
    /// `max(raw, 0)`, usable as a probability lower bound.
    pub value: f64,
    /// Whether the bound carries no information (`raw <= 0`).
    pub vacuous: bool,
}

/// See [`RegionHitBound`].
pub fn region_hit_rate_bound(
    intersection: f64,
    region_measure: f64,
    kl_sampler: f64,
) -> Result<RegionHitBound, TheoryError> {
    assert!(intersection >= 0.0, "intersection measure must be non-negative");
    assert!(kl_sampler >= 0.0, "KL divergence must be non-negative");
    if region_measure <= 0.0 {
        return Err(TheoryError::EmptyRegion);
    }
    let raw = intersection / region_measure - intersection * (kl_sampler / 2.0).sqrt();
    Ok(RegionHitBound {
        raw,
        value: raw.max(0.0),
        vacuous: raw <= 0.0,
    })
}

/// One optimizer iteration's inputs for [`average_hit_rate_bound`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    /// Queries spent in the iteration.
    pub m: u64,
    /// Measure of the iteration's threshold sublevel set.
    pub alpha_measure: f64,
    /// Observed training error of the iteration's hypothesis.
    pub train_error: f64,
    /// KL divergence of the batch-producing law from box-uniform.
    pub kl_train: f64,
    /// KL divergence of the region sampler from region-uniform.
    pub kl_sampler: f64,
}

/// Like [`IterationRecord`] but with the symmetric-difference bound
/// already pinned, for callers that compute or posit it themselves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PinnedIteration {
    /// Queries spent in the iteration.
    pub m: u64,
    /// Measure of the iteration's threshold sublevel set.
    pub alpha_measure: f64,
    /// Symmetric-difference error bound for the iteration's hypothesis.
    pub psi: f64,
    /// KL divergence of the region sampler from region-uniform.
    pub kl_sampler: f64,
}

/// A probability lower bound with clamping made explicit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HitRateBound {
    /// Raw value before clamping (may leave `[0, 1]`).
    pub raw: f64,
    /// `raw` clamped into `[0, 1]`.
    pub value: f64,
    /// Whether clamping changed the value.
    pub clamped: bool,
}

/// Query-weighted average lower bound on the learned-region sampler's
/// target hit rate across iterations, with per-iteration symmetric-
/// difference bounds supplied by the caller.
///
/// `(1 - eta) / sum(m_t) * sum(m_t * ((target - 2 psi_t) /
/// (alpha_measure_t + psi_t) - target * sqrt(kl_sampler_t / 2)))`.
pub fn average_hit_rate_bound_pinned(
    iterations: &[PinnedIteration],
    eta: f64,
    target_measure: f64,
) -> HitRateBound {
    assert!(!iterations.is_empty(), "need at least one iteration");
    assert!(eta > 0.0 && eta < 1.0, "confidence level {eta} outside (0, 1)");
    assert!(
        (0.0..=1.0).contains(&target_measure),
        "target measure outside [0, 1]"
    );
    let total: u64 = iterations.iter().map(|it| it.m).sum();
    assert!(total > 0, "iterations must spend at least one query");
    let sum: f64 = iterations
        .iter()
        .map(|it| {
            assert!(it.alpha_measure > 0.0, "threshold set must have positive measure");
            assert!(it.psi >= 0.0, "symmetric-difference bound must be non-negative");
            it.m as f64
                * ((target_measure - 2.0 * it.psi) / (it.alpha_measure + it.psi)
                    - target_measure * (it.kl_sampler / 2.0).sqrt())
        })
        .sum();
    let raw = (1.0 - eta) / total as f64 * sum;
    let value = raw.clamp(0.0, 1.0);
    HitRateBound {
        raw,
        value,
        clamped: value != raw,
    }
}

/// [`average_hit_rate_bound_pinned`] with each iteration's symmetric-
/// difference bound derived from its VC inputs via
/// [`symdiff_error_bound`].
pub fn average_hit_rate_bound(
    iterations: &[IterationRecord],
    d: usize,
    eta: f64,
    target_measure: f64,
) -> Result<HitRateBound, TheoryError> {
    let pinned = iterations
        .iter()
        .map(|it| {
            Ok(PinnedIteration {
                m: it.m,
                alpha_measure: it.alpha_measure,
                psi: symdiff_error_bound(it.train_error, d, it.m, eta, it.kl_train)?,
                kl_sampler: it.kl_sampler,
            })
        })
        .collect::<Result<Vec<_>, TheoryError>>()?;
    Ok(average_hit_rate_bound_pinned(&pinned, eta, target_measure))
}

/// First-hit query count of pure uniform search, as a quantile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UniformComplexity {
    /// Finite quantile for a positive hit rate.
    Finite {
        /// Smooth form `ln(1/delta) / pr_u`.
        ln_form: f64,
        /// Exact geometric quantile: smallest `k` with
        /// `(1 - pr_u)^k <= delta`.
        exact_quantile: u64,
    },
    /// Zero hit rate: uniform search never succeeds.
    Infinite,
}

/// Number of uniform queries after which a hit has probability at least
/// `1 - delta`, both in the smooth logarithmic form and as the exact
/// geometric quantile.
pub fn uniform_first_hit_quantile(pr_u: f64, delta: f64) -> UniformComplexity {
    assert!((0.0..=1.0).contains(&pr_u), "hit rate outside [0, 1]");
    assert!(delta > 0.0 && delta < 1.0, "failure level {delta} outside (0, 1)");
    if pr_u == 0.0 {
        return UniformComplexity::Infinite;
    }
    let ln_form = (1.0 / delta).ln() / pr_u;
    if pr_u >= 1.0 {
        return UniformComplexity::Finite {
            ln_form,
            exact_quantile: 1,
        };
    }
    let exact = (delta.ln() / (1.0 - pr_u).ln()).ceil() as u64;
    UniformComplexity::Finite {
        ln_form,
        exact_quantile: exact.max(1),
    }
}

/// KL divergence of the optimizer's per-query law from box-uniform, when
/// a fraction `lambda` of draws is uniform on a sub-region of measure
/// `region_measure` and the rest uniform on the unit-volume box.
pub fn mixture_kl_vs_uniform(lambda: f64, region_measure: f64) -> f64 {
    assert!((0.0..=1.0).contains(&lambda), "mixture weight outside [0, 1]");
    assert!(
        region_measure > 0.0 && region_measure <= 1.0,
        "region measure {region_measure} outside (0, 1]"
    );
    let inside = lambda / region_measure + (1.0 - lambda);
    let outside = 1.0 - lambda;
    let inside_term = region_measure * inside * inside.ln();
    let outside_term = if outside > 0.0 {
        (1.0 - region_measure) * outside * outside.ln()
    } else {
        0.0
    };
    inside_term + outside_term
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn vc_dim_of_balls() {
        assert_eq!(ball_class_vc_dim(1), 2);
        assert_eq!(ball_class_vc_dim(2), 3);
        assert_eq!(ball_class_vc_dim(5), 6);
    }

    #[test]
    fn vc_bound_zero_branch_spot_values() {
        assert_relative_eq!(
            vc_bound(10_000, 3, 0.5, 0.0),
            0.006160184030544789,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            vc_bound(100, 3, 0.5, 0.0),
            0.33970819189519347,
            max_relative = 1e-12
        );
    }

    #[test]
    fn vc_bound_general_branch_spot_value() {
        // The general branch with zero observed error is reachable through
        // the shift-corrected bound with zero shift.
        assert_relative_eq!(
            symdiff_error_bound(0.0, 3, 10_000, 0.5, 0.0).unwrap(),
            0.15873012904495198,
            max_relative = 1e-12
        );
    }

    #[test]
    fn vc_bound_clamps_to_probability_range() {
        assert_eq!(vc_bound(4, 3, 0.001, 0.0), 1.0);
        assert!(vc_bound(1_000_000, 2, 0.5, 0.0) > 0.0);
    }

    #[test]
    fn vc_bound_monotonicity_grid() {
        let ms = [10u64, 30, 100, 300, 1_000, 10_000, 100_000];
        // Decreasing in sample count (both branches).
        for err in [0.0, 0.05] {
            for w in ms.windows(2) {
                assert!(
                    vc_bound(w[0], 3, 0.5, err) >= vc_bound(w[1], 3, 0.5, err),
                    "not decreasing in m at {w:?}, err {err}"
                );
            }
        }
        // Increasing in VC dimension.
        for d in 1..8 {
            assert!(vc_bound(5_000, d, 0.5, 0.0) <= vc_bound(5_000, d + 1, 0.5, 0.0));
        }
        // Increasing as confidence tightens (eta shrinks).
        for etas in [0.5f64, 0.2, 0.1, 0.01].windows(2) {
            assert!(vc_bound(5_000, 3, etas[0], 0.0) <= vc_bound(5_000, 3, etas[1], 0.0));
        }
        // Increasing in training error.
        for errs in [0.01f64, 0.1, 0.2, 0.4].windows(2) {
            assert!(vc_bound(5_000, 3, 0.5, errs[0]) <= vc_bound(5_000, 3, 0.5, errs[1]));
        }
    }

    #[test]
    fn sample_size_inverts_zero_error_bound() {
        assert_eq!(sample_size_for_error(0.25, 3, 0.5), 145);
        assert_eq!(sample_size_for_error(0.125, 3, 0.5), 329);
        assert_eq!(sample_size_for_error(0.0625, 3, 0.5), 736);
        assert_eq!(sample_size_for_error(0.03125, 3, 0.5), 1623);
        assert_eq!(sample_size_for_error(0.5, 3, 0.5), 63);
        // Growth shape over progressively tighter targets.
        let targets = [0.25, 0.0625, 0.015625, 0.00390625];
        let ms: Vec<u64> = targets
            .iter()
            .map(|&t| sample_size_for_error(t, 3, 0.5))
            .collect();
        assert_eq!(ms, vec![145, 736, 3545, 16544]);
    }

    #[test]
    fn sample_size_is_tight() {
        for &target in &[0.6, 0.3, 0.1, 0.04, 0.011, 0.003] {
            for d in [2usize, 3, 6] {
                let m = sample_size_for_error(target, d, 0.5);
                assert!(vc_bound(m, d, 0.5, 0.0) <= target, "m not sufficient");
                if m > d as u64 {
                    assert!(
                        vc_bound(m - 1, d, 0.5, 0.0) > target,
                        "m - 1 already sufficient for target {target}, d {d}"
                    );
                }
            }
        }
    }

    #[test]
    fn symdiff_bound_shift_behavior() {
        let base = symdiff_error_bound(0.0, 3, 10_000, 0.5, 0.0).unwrap();
        let shifted = symdiff_error_bound(0.0, 3, 10_000, 0.5, 0.5).unwrap();
        assert_relative_eq!(shifted, base / 0.5, max_relative = 1e-12);
        // Increasing in the shift until it becomes undefined.
        let kls = [0.0, 0.2, 0.5, 1.0, 1.9, 1.99];
        for w in kls.windows(2) {
            let a = symdiff_error_bound(0.0, 3, 1_000, 0.5, w[0]).unwrap();
            let b = symdiff_error_bound(0.0, 3, 1_000, 0.5, w[1]).unwrap();
            assert!(a <= b);
        }
        assert_eq!(
            symdiff_error_bound(0.0, 3, 1_000, 0.5, 2.0),
            Err(TheoryError::UndefinedShiftBound(2.0))
        );
        assert!(symdiff_error_bound(0.0, 3, 1_000, 0.5, 5.0).is_err());
    }

    #[test]
    fn mixture_query_bound_spot_values() {
        // Pure uniform component: ln(1/delta) / pr_u.
        let b = mixture_query_bound(0.1, 0.0, 0.0, (-1.0f64).exp(), 0, 0);
        assert_relative_eq!(b.finite().unwrap(), 10.0, max_relative = 1e-12);
        // Pure region component.
        let b = mixture_query_bound(0.0, 0.5, 1.0, 0.01, 0, 0);
        assert_relative_eq!(
            b.finite().unwrap(),
            9.210340371976184,
            max_relative = 1e-12
        );
        // Scheduled queries dominate the logarithmic term.
        let b = mixture_query_bound(0.2, 0.8, 0.5, (-1.0f64).exp(), 4, 6);
        assert_relative_eq!(b.finite().unwrap(), 10.0, max_relative = 1e-12);
    }

    #[test]
    fn mixture_query_bound_infinite_signals() {
        assert!(mixture_query_bound(0.0, 0.9, 0.0, 0.1, 5, 10).is_infinite());
        assert!(mixture_query_bound(0.9, 0.0, 1.0, 0.1, 5, 10).is_infinite());
        assert!(mixture_query_bound(0.0, 0.0, 0.5, 0.1, 5, 10).is_infinite());
    }

    #[test]
    fn mixture_query_bound_ignores_region_rate_at_lambda_zero() {
        for pr_h in [0.0, 0.3, 0.9] {
            assert_eq!(
                mixture_query_bound(0.25, pr_h, 0.0, 0.1, 7, 0),
                mixture_query_bound(0.25, 0.0, 0.0, 0.1, 7, 0)
            );
        }
    }

    #[test]
    fn mixture_query_bound_monotonicity_grid() {
        // Decreasing in both hit rates; increasing as delta tightens.
        for rates in [0.05f64, 0.1, 0.3, 0.8].windows(2) {
            let lo = mixture_query_bound(rates[1], 0.2, 0.5, 0.1, 0, 0);
            let hi = mixture_query_bound(rates[0], 0.2, 0.5, 0.1, 0, 0);
            assert!(hi.finite().unwrap() >= lo.finite().unwrap());
            let lo = mixture_query_bound(0.2, rates[1], 0.5, 0.1, 0, 0);
            let hi = mixture_query_bound(0.2, rates[0], 0.5, 0.1, 0, 0);
            assert!(hi.finite().unwrap() >= lo.finite().unwrap());
        }
        for deltas in [0.01f64, 0.05, 0.1, 0.3].windows(2) {
            let tight = mixture_query_bound(0.2, 0.2, 0.5, deltas[0], 0, 0);
            let loose = mixture_query_bound(0.2, 0.2, 0.5, deltas[1], 0, 0);
            assert!(tight.finite().unwrap() >= loose.finite().unwrap());
        }
    }

    #[test]
    fn average_hit_rate_bound_spot_value() {
        let iterations = [PinnedIteration {
            m: 50,
            alpha_measure: 0.1,
            psi: 0.001,
            kl_sampler: 0.0,
        }];
        let bound = average_hit_rate_bound_pinned(&iterations, 0.5, 0.01);
        assert_relative_eq!(bound.value, 0.039603960396039604, max_relative = 1e-12);
        assert!(!bound.clamped);
        assert_eq!(bound.raw, bound.value);
    }

    #[test]
    fn average_hit_rate_bound_weights_by_queries() {
        // Two iterations, one worthless: the average sits between, tilted
        // toward the heavier one.
        let good = PinnedIteration {
            m: 900,
            alpha_measure: 0.02,
            psi: 0.0,
            kl_sampler: 0.0,
        };
        let bad = PinnedIteration {
            m: 100,
            alpha_measure: 0.5,
            psi: 0.0,
            kl_sampler: 0.0,
        };
        let both = average_hit_rate_bound_pinned(&[good, bad], 0.5, 0.01);
        let only_good = average_hit_rate_bound_pinned(&[good], 0.5, 0.01);
        let only_bad = average_hit_rate_bound_pinned(&[bad], 0.5, 0.01);
        assert!(both.value < only_good.value);
        assert!(both.value > only_bad.value);
        let expected = 0.9 * only_good.value + 0.1 * only_bad.value;
        assert_relative_eq!(both.value, expected, max_relative = 1e-12);
    }

    #[test]
    fn average_hit_rate_bound_clamps_and_flags() {
        // A huge symmetric-difference bound drives the raw value negative.
        let hopeless = PinnedIteration {
            m: 10,
            alpha_measure: 0.1,
            psi: 0.5,
            kl_sampler: 0.0,
        };
        let bound = average_hit_rate_bound_pinned(&[hopeless], 0.5, 0.01);
        assert!(bound.raw < 0.0);
        assert_eq!(bound.value, 0.0);
        assert!(bound.clamped);
    }

    #[test]
    fn average_hit_rate_bound_derives_psi_from_vc_inputs() {
        let records = [IterationRecord {
            m: 10_000,
            alpha_measure: 0.1,
            train_error: 0.0,
            kl_train: 0.0,
            kl_sampler: 0.0,
        }];
        let psi = symdiff_error_bound(0.0, 3, 10_000, 0.5, 0.0).unwrap();
        let via_records = average_hit_rate_bound(&records, 3, 0.5, 0.01).unwrap();
        let via_pinned = average_hit_rate_bound_pinned(
            &[PinnedIteration {
                m: 10_000,
                alpha_measure: 0.1,
                psi,
                kl_sampler: 0.0,
            }],
            0.5,
            0.01,
        );
        assert_eq!(via_records, via_pinned);
        // Excessive shift propagates as an error.
        let shifted = [IterationRecord {
            kl_train: 2.5,
            ..records[0]
        }];
        assert!(matches!(
            average_hit_rate_bound(&shifted, 3, 0.5, 0.01),
            Err(TheoryError::UndefinedShiftBound(_))
        ));
    }

    #[test]
    fn region_hit_rate_bound_spot_value() {
        let b = region_hit_rate_bound(0.02, 0.1, 0.08).unwrap();
        assert_relative_eq!(b.value, 0.19599999999999998, max_relative = 1e-12);
        assert!(!b.vacuous);
        // Zero shift recovers the exact conditional rate.
        let exact = region_hit_rate_bound(0.02, 0.1, 0.0).unwrap();
        assert_relative_eq!(exact.value, 0.2, max_relative = 1e-12);
    }

    #[test]
    fn region_hit_rate_bound_vacuous_and_degenerate() {
        // Shift so large the correction swallows the rate.
        let b = region_hit_rate_bound(0.02, 0.1, 200.0).unwrap();
        assert!(b.vacuous);
        assert_eq!(b.value, 0.0);
        assert!(b.raw <= 0.0);
        assert_eq!(
            region_hit_rate_bound(0.02, 0.0, 0.0),
            Err(TheoryError::EmptyRegion)
        );
    }

    #[test]
    fn mixture_to_uniform_error_behavior() {
        assert_relative_eq!(
            mixture_to_uniform_error(0.1, 0.5).unwrap(),
            0.2,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            mixture_to_uniform_error(0.1, 0.0).unwrap(),
            0.1,
            max_relative = 1e-12
        );
        assert_eq!(
            mixture_to_uniform_error(0.1, 1.0),
            Err(TheoryError::DegenerateMixture)
        );
    }

    #[test]
    fn uniform_quantile_spot_values() {
        match uniform_first_hit_quantile(0.4, 0.1) {
            UniformComplexity::Finite {
                ln_form,
                exact_quantile,
            } => {
                assert_relative_eq!(ln_form, 5.756462732485114, max_relative = 1e-12);
                assert_eq!(exact_quantile, 5);
            }
            UniformComplexity::Infinite => panic!("finite rate must give finite quantile"),
        }
        match uniform_first_hit_quantile(0.1, (-1.0f64).exp()) {
            UniformComplexity::Finite {
                ln_form,
                exact_quantile,
            } => {
                assert_relative_eq!(ln_form, 10.0, max_relative = 1e-12);
                assert_eq!(exact_quantile, 10);
            }
            UniformComplexity::Infinite => panic!("finite rate must give finite quantile"),
        }
        assert_eq!(uniform_first_hit_quantile(0.0, 0.1), UniformComplexity::Infinite);
        assert_eq!(
            uniform_first_hit_quantile(1.0, 0.1),
            UniformComplexity::Finite {
                ln_form: (10.0f64).ln(),
                exact_quantile: 1
            }
        );
    }

    #[test]
    fn uniform_quantile_definition_grid() {
        // The exact quantile is the smallest k with (1 - p)^k <= delta,
        // and it never exceeds the smooth form by more than one query.
        for &p in &[0.01f64, 0.05, 0.2, 0.4, 0.7, 0.95] {
            for &delta in &[0.01f64, 0.1, 0.3, 0.5, 0.9] {
                if let UniformComplexity::Finite {
                    ln_form,
                    exact_quantile,
                } = uniform_first_hit_quantile(p, delta)
                {
                    let k = exact_quantile as f64;
                    assert!((1.0 - p).powf(k) <= delta + 1e-12);
                    if exact_quantile > 1 {
                        assert!((1.0 - p).powf(k - 1.0) > delta - 1e-12);
                    }
                    assert!(k <= ln_form + 1.0 + 1e-9, "p {p}, delta {delta}");
                } else {
                    panic!("positive rates give finite quantiles");
                }
            }
        }
    }

    #[test]
    fn mixture_kl_spot_and_edges() {
        assert_relative_eq!(
            mixture_kl_vs_uniform(0.5, 0.25),
            0.3127515147113675,
            max_relative = 1e-12
        );
        assert_eq!(mixture_kl_vs_uniform(0.0, 0.25), 0.0);
        // Pure region sampling: KL = ln(1 / region measure).
        assert_relative_eq!(
            mixture_kl_vs_uniform(1.0, 0.25),
            4.0f64.ln(),
            max_relative = 1e-12
        );
        // Region = whole box: no divergence regardless of weight.
        assert_relative_eq!(mixture_kl_vs_uniform(0.7, 1.0), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn mixture_kl_monotonicity_grid() {
        // Increasing in the mixture weight, decreasing in region size.
        for lams in [0.0f64, 0.2, 0.5, 0.8, 1.0].windows(2) {
            assert!(
                mixture_kl_vs_uniform(lams[0], 0.3) <= mixture_kl_vs_uniform(lams[1], 0.3)
            );
        }
        for sizes in [0.05f64, 0.1, 0.3, 0.7, 1.0].windows(2) {
            assert!(
                mixture_kl_vs_uniform(0.5, sizes[0]) >= mixture_kl_vs_uniform(0.5, sizes[1])
            );
        }
    }
}
