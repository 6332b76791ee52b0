//! Euclidean balls, uniform sampling inside them, and Monte Carlo measures.
//!
//! Everything here works in arbitrary dimension. Ball sampling composes a
//! Gaussian direction with a radially corrected radius, so it is exact (no
//! rejection); sampling a ball restricted to a box rejection-samples with a
//! bounded number of attempts and reports failure instead of looping
//! forever. The Monte Carlo helpers return standard errors alongside every
//! estimate so callers can state tolerances in sigmas.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::problems::BoxBounds;

/// Default cap on rejection attempts when sampling a ball clipped to a box.
pub const DEFAULT_MAX_REJECTS: u32 = 100;

/// A closed Euclidean ball.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    /// Center point.
    pub center: Vec<f64>,
    /// Radius, non-negative.
    pub radius: f64,
}

impl Ball {
    /// Builds a ball; the radius must be non-negative and finite.
    pub fn new(center: Vec<f64>, radius: f64) -> Self {
        assert!(
            radius >= 0.0 && radius.is_finite(),
            "ball radius {radius} must be finite and non-negative"
        );
        assert!(!center.is_empty(), "ball center must have dimension >= 1");
        Self { center, radius }
    }

    /// Dimension of the ambient space.
    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// Whether `x` lies in the closed ball.
    pub fn contains(&self, x: &[f64]) -> bool {
        debug_assert_eq!(x.len(), self.dim());
        let d2: f64 = self
            .center
            .iter()
            .zip(x)
            .map(|(c, v)| (c - v) * (c - v))
            .sum();
        d2 <= self.radius * self.radius
    }

    /// Volume of the ball.
    pub fn volume(&self) -> f64 {
        ball_volume(self.dim(), self.radius)
    }
}

/// Volume of the n-dimensional ball of radius `r`.
///
/// Computed in log space as `exp(n/2 * ln(pi) + n * ln(r) - ln((n/2)!))`,
/// which stays accurate in high dimension where the direct formula
/// under- or overflows.
pub fn ball_volume(n: usize, r: f64) -> f64 {
    assert!(n >= 1, "dimension must be at least 1");
    assert!(r >= 0.0 && r.is_finite(), "radius {r} must be non-negative");
    if r == 0.0 {
        return 0.0;
    }
    let half_n = n as f64 / 2.0;
    (half_n * std::f64::consts::PI.ln() + n as f64 * r.ln() - libm::lgamma(half_n + 1.0)).exp()
}

/// Draws a point uniformly from a ball.
///
/// Direction comes from normalized Gaussian coordinates; the radius is
/// `r * U^(1/n)` so that volume shells are weighted correctly.
pub fn sample_in_ball<R: Rng + ?Sized>(ball: &Ball, rng: &mut R) -> Vec<f64> {
    let n = ball.dim();
    let mut dir = vec![0.0f64; n];
    let mut norm = 0.0;
    while norm == 0.0 {
        for d in dir.iter_mut() {
            *d = rng.sample(StandardNormal);
        }
        norm = dir.iter().map(|d| d * d).sum::<f64>().sqrt();
    }
    let radius = ball.radius * rng.random::<f64>().powf(1.0 / n as f64);
    ball.center
        .iter()
        .zip(&dir)
        .map(|(c, d)| c + d / norm * radius)
        .collect()
}

/// Draws a point uniformly from `ball ∩ box` by rejection.
///
/// Makes at most `max_rejects` draws from the ball and returns the first
/// one inside the box, or `None` if every attempt landed outside. A `None`
/// means the caller should fall back to some other proposal; conditioned
/// on `Some`, the point is exactly uniform on the intersection.
pub fn sample_in_ball_clipped<R: Rng + ?Sized>(
    ball: &Ball,
    bounds: &BoxBounds,
    rng: &mut R,
    max_rejects: u32,
) -> Option<Vec<f64>> {
    for _ in 0..max_rejects {
        let x = sample_in_ball(ball, rng);
        if bounds.contains(&x) {
            return Some(x);
        }
    }
    None
}

/// A Monte Carlo volume estimate with its sampling error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeEstimate {
    /// Estimated measure of the region.
    pub value: f64,
    /// Binomial standard error of `value`.
    pub std_err: f64,
    /// Number of draws that landed in the region.
    pub hits: u64,
    /// Total number of draws.
    pub samples: u64,
}

/// Estimates the measure of `region ∩ box` from uniform box draws.
///
/// The estimate is `box_volume * hits / samples`, which is unbiased; the
/// standard error is the binomial one. `samples` must be positive.
pub fn mc_volume<F, R>(region: F, bounds: &BoxBounds, samples: u64, rng: &mut R) -> VolumeEstimate
where
    F: Fn(&[f64]) -> bool,
    R: Rng + ?Sized,
{
    assert!(samples > 0, "need at least one Monte Carlo sample");
    let mut hits = 0u64;
    for _ in 0..samples {
        let x = bounds.sample(rng);
        if region(&x) {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    let v = bounds.volume();
    VolumeEstimate {
        value: v * p,
        std_err: v * (p * (1.0 - p) / samples as f64).sqrt(),
        hits,
        samples,
    }
}

/// Joint-versus-product comparison for two regions under the uniform law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndependenceReport {
    /// Measure of `target ∩ symdiff` (the joint).
    pub joint: f64,
    /// Product of the two marginal measures.
    pub product: f64,
    /// Normal z-score of `joint - product`; zero when degenerate.
    pub z_score: f64,
    /// Number of common draws used.
    pub samples: u64,
}

/// Tests whether membership in `target` is independent of disagreement
/// between `region_a` and `region_b`, under the uniform law on the box.
///
/// All three indicators are evaluated on one common sample set, so the
/// z-score reflects genuine dependence rather than sampling mismatch. When
/// either marginal is degenerate (probability 0 or 1) the joint equals the
/// product identically and the z-score is reported as 0.
pub fn check_error_target_independence<F, G, H, R>(
    target: F,
    region_a: G,
    region_b: H,
    bounds: &BoxBounds,
    samples: u64,
    rng: &mut R,
) -> IndependenceReport
where
    F: Fn(&[f64]) -> bool,
    G: Fn(&[f64]) -> bool,
    H: Fn(&[f64]) -> bool,
    R: Rng + ?Sized,
{
    assert!(samples > 0, "need at least one Monte Carlo sample");
    let mut n_t = 0u64;
    let mut n_d = 0u64;
    let mut n_td = 0u64;
    for _ in 0..samples {
        let x = bounds.sample(rng);
        let t = target(&x);
        let d = region_a(&x) != region_b(&x);
        n_t += u64::from(t);
        n_d += u64::from(d);
        n_td += u64::from(t && d);
    }
    let m = samples as f64;
    let v = bounds.volume();
    let p_t = n_t as f64 / m;
    let p_d = n_d as f64 / m;
    let p_td = n_td as f64 / m;
    let var = p_t * p_d * (1.0 - p_t) * (1.0 - p_d) / m;
    let z_score = if var > 0.0 {
        (p_td - p_t * p_d) / var.sqrt()
    } else {
        // Degenerate marginal: the joint equals the product by construction.
        0.0
    };
    IndependenceReport {
        joint: v * p_td,
        product: (v * p_t) * (v * p_d),
        z_score,
        samples,
    }
}

/// Measure of `in_hypothesis \ in_level`: mass the hypothesis claims beyond
/// the level region. Zero (up to sampling error) means the hypothesis only
/// errs on the other side.
pub fn check_one_side_error<F, G, R>(
    in_level: F,
    in_hypothesis: G,
    bounds: &BoxBounds,
    samples: u64,
    rng: &mut R,
) -> VolumeEstimate
where
    F: Fn(&[f64]) -> bool,
    G: Fn(&[f64]) -> bool,
    R: Rng + ?Sized,
{
    mc_volume(|x| in_hypothesis(x) && !in_level(x), bounds, samples, rng)
}
