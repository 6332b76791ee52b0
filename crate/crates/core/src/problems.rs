//! Benchmark minimization problems on axis-aligned box domains.
//!
//! Both built-in problems are normalized so that the domain has unit volume
//! and objective values stay in `[0, 1]`:
//!
//! * [`SphereProblem`]: mean squared distance to an optimum inside the unit
//!   box `[0, 1]^n`. Its sublevel sets are balls, so their measure is known
//!   in closed form whenever the ball is not clipped by the box.
//! * [`SpikeProblem`]: a sawtooth profile of the normalized distance to an
//!   optimum inside the centered box `[-1/2, 1/2]^n`. Locally deceptive:
//!   the profile keeps returning to small values away from the optimum, so
//!   threshold sublevel sets are unions of thin shells.

use rand::Rng;
use thiserror::Error;

use crate::geometry::{ball_volume, mc_volume};

/// Errors from domain or argument validation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    /// The domain must have at least one coordinate.
    #[error("dimension must be at least 1")]
    ZeroDimension,
    /// A point's length does not match the problem dimension.
    #[error("point has dimension {got}, expected {want}")]
    DimensionMismatch {
        /// Expected dimension.
        want: usize,
        /// Dimension of the offending point.
        got: usize,
    },
    /// A coordinate lies outside its box interval.
    #[error("coordinate {index} = {value} is outside [{lo}, {hi}]")]
    OutOfBox {
        /// Index of the offending coordinate.
        index: usize,
        /// Offending value.
        value: f64,
        /// Lower bound of the interval.
        lo: f64,
        /// Upper bound of the interval.
        hi: f64,
    },
    /// Box intervals are malformed (`lo >= hi` or mismatched lengths).
    #[error("invalid box: {0}")]
    InvalidBox(String),
}

/// An axis-aligned box given as closed per-coordinate intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxBounds {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl BoxBounds {
    /// Builds a box from per-coordinate interval endpoints.
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self, ProblemError> {
        if lo.is_empty() {
            return Err(ProblemError::ZeroDimension);
        }
        if lo.len() != hi.len() {
            return Err(ProblemError::InvalidBox(format!(
                "{} lower bounds but {} upper bounds",
                lo.len(),
                hi.len()
            )));
        }
        for (i, (&a, &b)) in lo.iter().zip(&hi).enumerate() {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(ProblemError::InvalidBox(format!(
                    "interval {i} = [{a}, {b}] is not a proper finite interval"
                )));
            }
        }
        Ok(Self { lo, hi })
    }

    /// The unit box `[0, 1]^n`.
    pub fn unit(n: usize) -> Self {
        Self::new(vec![0.0; n], vec![1.0; n]).expect("unit box is valid for n >= 1")
    }

    /// The centered box `[-1/2, 1/2]^n`.
    pub fn centered(n: usize) -> Self {
        Self::new(vec![-0.5; n], vec![0.5; n]).expect("centered box is valid for n >= 1")
    }

    /// Number of coordinates.
    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    /// Per-coordinate lower bounds.
    pub fn lower(&self) -> &[f64] {
        &self.lo
    }

    /// Per-coordinate upper bounds.
    pub fn upper(&self) -> &[f64] {
        &self.hi
    }

    /// Product of interval lengths.
    pub fn volume(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| b - a)
            .product()
    }

    /// Whether `x` lies inside the box (boundary included).
    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(&v, (&a, &b))| v >= a && v <= b)
    }

    /// Like [`contains`](Self::contains) but reports which check failed.
    pub fn check(&self, x: &[f64]) -> Result<(), ProblemError> {
        if x.len() != self.dim() {
            return Err(ProblemError::DimensionMismatch {
                want: self.dim(),
                got: x.len(),
            });
        }
        for (i, (&v, (&a, &b))) in x.iter().zip(self.lo.iter().zip(&self.hi)).enumerate() {
            if !(v >= a && v <= b) {
                return Err(ProblemError::OutOfBox {
                    index: i,
                    value: v,
                    lo: a,
                    hi: b,
                });
            }
        }
        Ok(())
    }

    /// Draws a point uniformly from the box.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(&a, &b)| rng.random_range(a..b))
            .collect()
    }
}

/// A measure that is either known in closed form or Monte Carlo estimated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeasureEstimate {
    /// Closed-form value.
    Exact(f64),
    /// Monte Carlo estimate with its standard error.
    Approximate {
        /// Estimated measure.
        value: f64,
        /// Standard error of the estimate.
        std_err: f64,
    },
}

impl MeasureEstimate {
    /// The numeric value regardless of provenance.
    pub fn value(&self) -> f64 {
        match *self {
            MeasureEstimate::Exact(v) => v,
            MeasureEstimate::Approximate { value, .. } => value,
        }
    }

    /// Standard error: zero for exact values.
    pub fn std_err(&self) -> f64 {
        match *self {
            MeasureEstimate::Exact(_) => 0.0,
            MeasureEstimate::Approximate { std_err, .. } => std_err,
        }
    }

    /// Whether the value is closed-form rather than estimated.
    pub fn is_exact(&self) -> bool {
        matches!(self, MeasureEstimate::Exact(_))
    }
}

/// A black-box minimization problem over a box domain.
///
/// Implementations must be deterministic: repeated evaluation at the same
/// point returns the same value, and the only way the optimizer observes
/// the objective is through [`eval`](Problem::eval).
pub trait Problem: Send + Sync {
    /// Dimension of the domain.
    fn dim(&self) -> usize;

    /// The box domain.
    fn bounds(&self) -> &BoxBounds;

    /// Evaluates the objective at an in-domain point.
    fn eval(&self, x: &[f64]) -> Result<f64, ProblemError>;
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Mean squared distance to an optimum in the unit box.
///
/// `f(x) = (1/n) * ||x - x*||^2` on `[0, 1]^n`, so values stay in `[0, 1]`
/// and the sublevel set at height `alpha` is the ball of radius
/// `sqrt(n * alpha)` around the optimum, intersected with the box.
#[derive(Debug, Clone)]
pub struct SphereProblem {
    x_star: Vec<f64>,
    bounds: BoxBounds,
}

impl SphereProblem {
    /// Builds the problem with an explicit optimum inside `[0, 1]^n`.
    pub fn new(x_star: Vec<f64>) -> Result<Self, ProblemError> {
        let bounds = BoxBounds::unit(x_star.len().max(1));
        if x_star.is_empty() {
            return Err(ProblemError::ZeroDimension);
        }
        bounds.check(&x_star)?;
        Ok(Self { x_star, bounds })
    }

    /// Builds the problem with an optimum drawn uniformly from the box.
    pub fn seeded<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self, ProblemError> {
        if n == 0 {
            return Err(ProblemError::ZeroDimension);
        }
        let bounds = BoxBounds::unit(n);
        let x_star = bounds.sample(rng);
        Ok(Self { x_star, bounds })
    }

    /// The optimum.
    pub fn x_star(&self) -> &[f64] {
        &self.x_star
    }

    /// Radius of the sublevel ball at height `alpha`.
    pub fn sublevel_radius(&self, alpha: f64) -> f64 {
        (self.dim() as f64 * alpha).sqrt()
    }

    /// Whether `x` lies in the sublevel set at height `alpha`.
    ///
    /// Uses the exact ball geometry, not an objective evaluation, so it is
    /// safe to use as a region predicate without spending queries.
    pub fn sublevel_contains(&self, alpha: f64, x: &[f64]) -> bool {
        squared_distance(x, &self.x_star) <= self.dim() as f64 * alpha
    }

    /// Closed-form sublevel measure, when one exists: the ball volume
    /// when the sublevel ball lies entirely inside the box, the box
    /// volume when the ball covers every box corner, `None` when the
    /// ball is clipped by the boundary.
    pub fn sublevel_measure_exact(&self, alpha: f64) -> Option<f64> {
        let n = self.dim();
        let r = self.sublevel_radius(alpha);
        let lo = self.bounds.lower();
        let hi = self.bounds.upper();
        let inside = self
            .x_star
            .iter()
            .zip(lo.iter().zip(hi))
            .all(|(&c, (&a, &b))| c - r >= a && c + r <= b);
        if inside {
            return Some(ball_volume(n, r));
        }
        // The ball covers the box iff the farthest box corner is within r.
        let farthest_sq: f64 = self
            .x_star
            .iter()
            .zip(lo.iter().zip(hi))
            .map(|(&c, (&a, &b))| {
                let d = (c - a).max(b - c);
                d * d
            })
            .sum();
        if farthest_sq <= r * r {
            return Some(self.bounds.volume());
        }
        None
    }

    /// Measure of the sublevel set at height `alpha` inside the box.
    ///
    /// Returns a closed-form value when the sublevel ball is entirely
    /// inside the box (ball volume) or covers the whole box (box volume);
    /// otherwise falls back to a Monte Carlo estimate with `mc_samples`
    /// uniform draws from the box.
    pub fn sublevel_measure<R: Rng + ?Sized>(
        &self,
        alpha: f64,
        mc_samples: u64,
        rng: &mut R,
    ) -> MeasureEstimate {
        if let Some(v) = self.sublevel_measure_exact(alpha) {
            return MeasureEstimate::Exact(v);
        }
        let est = mc_volume(
            |x| self.sublevel_contains(alpha, x),
            &self.bounds,
            mc_samples,
            rng,
        );
        MeasureEstimate::Approximate {
            value: est.value,
            std_err: est.std_err,
        }
    }
}

impl Problem for SphereProblem {
    fn dim(&self) -> usize {
        self.x_star.len()
    }

    fn bounds(&self) -> &BoxBounds {
        &self.bounds
    }

    fn eval(&self, x: &[f64]) -> Result<f64, ProblemError> {
        self.bounds.check(x)?;
        Ok(squared_distance(x, &self.x_star) / self.dim() as f64)
    }
}

/// Sawtooth radial profile used by [`SpikeProblem`].
///
/// Piecewise linear on `[0, 1]` with slope `+1` on the closed intervals
/// `[3k/20, (3k+2)/20]` (k = 0..=6, value `r - k/10`) and slope `-1` on the
/// open gaps between them (value `-r + (k+1)/5`). Interval endpoints belong
/// to the rising pieces. The profile satisfies `0 <= spike_profile(r) <= r`
/// with equality to zero only at `r = 0`, jump-free with a maximum of
/// `0.4` at `r = 1`.
pub fn spike_profile(r: f64) -> f64 {
    assert!(
        (0.0..=1.0).contains(&r),
        "profile argument {r} outside [0, 1]"
    );
    let s = 20.0 * r;
    let k = (s / 3.0).floor().min(6.0);
    if s - 3.0 * k <= 2.0 {
        r - k / 10.0
    } else {
        -r + (k + 1.0) / 5.0
    }
}

/// Sawtooth of the normalized distance to an optimum in the centered box.
///
/// `f(x) = spike_profile(||x - x*|| / sqrt(n))` on `[-1/2, 1/2]^n`. The
/// global minimum is `0` at `x*` only, but the profile dips close to zero
/// again at every rising piece, so low-threshold sublevel sets are a small
/// ball around `x*` plus thin spherical shells around it.
#[derive(Debug, Clone)]
pub struct SpikeProblem {
    x_star: Vec<f64>,
    bounds: BoxBounds,
}

impl SpikeProblem {
    /// Builds the problem with an explicit optimum inside `[-1/2, 1/2]^n`.
    pub fn new(x_star: Vec<f64>) -> Result<Self, ProblemError> {
        if x_star.is_empty() {
            return Err(ProblemError::ZeroDimension);
        }
        let bounds = BoxBounds::centered(x_star.len());
        bounds.check(&x_star)?;
        Ok(Self { x_star, bounds })
    }

    /// Builds the problem with an optimum drawn uniformly from the box.
    pub fn seeded<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self, ProblemError> {
        if n == 0 {
            return Err(ProblemError::ZeroDimension);
        }
        let bounds = BoxBounds::centered(n);
        let x_star = bounds.sample(rng);
        Ok(Self { x_star, bounds })
    }

    /// The optimum.
    pub fn x_star(&self) -> &[f64] {
        &self.x_star
    }

    /// Monte Carlo measure of the sublevel set at height `alpha`.
    ///
    /// Spike sublevel sets are unions of clipped shells, so there is no
    /// closed form; this always estimates from `mc_samples` box draws.
    pub fn sublevel_measure<R: Rng + ?Sized>(
        &self,
        alpha: f64,
        mc_samples: u64,
        rng: &mut R,
    ) -> MeasureEstimate {
        let est = mc_volume(
            |x| self.eval(x).map(|y| y <= alpha).unwrap_or(false),
            &self.bounds,
            mc_samples,
            rng,
        );
        MeasureEstimate::Approximate {
            value: est.value,
            std_err: est.std_err,
        }
    }

    /// Closed-form bracket `[lo, hi]` for the measure of the sublevel set
    /// at height `alpha < 0.1`, assuming the innermost ball is unclipped.
    ///
    /// Because `spike_profile(r) <= r` with the first descending piece
    /// re-entering the level only past `r = alpha`, the sublevel set
    /// contains the ball of normalized radius `alpha` and, for small
    /// `alpha`, is contained in shells of total radial length `< 3*alpha`
    /// worth of ball volume growth; this yields volume bounds
    /// `C_n * alpha^n <= |D_alpha| <= C_n * (3*alpha)^n` with
    /// `C_n = ball_volume(n, sqrt(n))`.
    pub fn sublevel_bracket(&self, alpha: f64) -> (f64, f64) {
        let n = self.dim();
        let unit = ball_volume(n, (n as f64).sqrt());
        (
            unit * alpha.powi(n as i32),
            unit * (3.0 * alpha).powi(n as i32),
        )
    }
}

impl Problem for SpikeProblem {
    fn dim(&self) -> usize {
        self.x_star.len()
    }

    fn bounds(&self) -> &BoxBounds {
        &self.bounds
    }

    fn eval(&self, x: &[f64]) -> Result<f64, ProblemError> {
        self.bounds.check(x)?;
        let r = (squared_distance(x, &self.x_star) / self.dim() as f64)
            .sqrt()
            .min(1.0);
        Ok(spike_profile(r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn box_construction_and_volume() {
        let b = BoxBounds::new(vec![0.0, -1.0], vec![2.0, 1.0]).unwrap();
        assert_eq!(b.dim(), 2);
        assert_relative_eq!(b.volume(), 4.0);
        assert!(b.contains(&[0.0, -1.0]));
        assert!(b.contains(&[2.0, 1.0]));
        assert!(!b.contains(&[2.0 + 1e-12, 0.0]));
        assert!(!b.contains(&[1.0]));
        assert_relative_eq!(BoxBounds::unit(3).volume(), 1.0);
        assert_relative_eq!(BoxBounds::centered(5).volume(), 1.0);
    }

    #[test]
    fn box_rejects_malformed_intervals() {
        assert_eq!(
            BoxBounds::new(vec![], vec![]),
            Err(ProblemError::ZeroDimension)
        );
        assert!(matches!(
            BoxBounds::new(vec![0.0], vec![0.0]),
            Err(ProblemError::InvalidBox(_))
        ));
        assert!(matches!(
            BoxBounds::new(vec![1.0], vec![0.0]),
            Err(ProblemError::InvalidBox(_))
        ));
        assert!(matches!(
            BoxBounds::new(vec![0.0, 0.0], vec![1.0]),
            Err(ProblemError::InvalidBox(_))
        ));
        assert!(matches!(
            BoxBounds::new(vec![f64::NEG_INFINITY], vec![0.0]),
            Err(ProblemError::InvalidBox(_))
        ));
    }

    #[test]
    fn box_samples_stay_inside_and_fill_quadrants() {
        let b = BoxBounds::centered(2);
        let mut r = rng(7);
        let mut quadrants = [0u32; 4];
        for _ in 0..10_000 {
            let x = b.sample(&mut r);
            assert!(b.contains(&x));
            let q = (x[0] >= 0.0) as usize + 2 * (x[1] >= 0.0) as usize;
            quadrants[q] += 1;
        }
        // Each quadrant has probability 1/4; allow 5 sigma.
        for &c in &quadrants {
            assert!((c as f64 - 2500.0).abs() < 5.0 * (10_000.0f64 * 0.25 * 0.75).sqrt());
        }
    }

    #[test]
    fn sphere_eval_examples() {
        // Value at the optimum is zero.
        let p = SphereProblem::new(vec![0.3, 0.7]).unwrap();
        assert_eq!(p.eval(&[0.3, 0.7]).unwrap(), 0.0);
        // n = 1: f(x) = (x - x*)^2.
        let p = SphereProblem::new(vec![0.5]).unwrap();
        assert_relative_eq!(p.eval(&[0.8]).unwrap(), 0.09, max_relative = 1e-12);
        // n = 2 with x* at a corner: f((1,1)) = (1 + 1)/2 = 1.
        let p = SphereProblem::new(vec![0.0, 0.0]).unwrap();
        assert_relative_eq!(p.eval(&[1.0, 1.0]).unwrap(), 1.0);
    }

    #[test]
    fn sphere_rejects_out_of_box() {
        let p = SphereProblem::new(vec![0.5, 0.5]).unwrap();
        assert!(matches!(
            p.eval(&[1.5, 0.5]),
            Err(ProblemError::OutOfBox { index: 0, .. })
        ));
        assert!(matches!(
            p.eval(&[0.5]),
            Err(ProblemError::DimensionMismatch { want: 2, got: 1 })
        ));
        assert!(SphereProblem::new(vec![1.5]).is_err());
    }

    #[test]
    fn sphere_sublevel_measure_unclipped_1d() {
        // n = 1, x* = 0.5, alpha = 0.04: interval of half-width 0.2.
        let p = SphereProblem::new(vec![0.5]).unwrap();
        let m = p.sublevel_measure(0.04, 0, &mut rng(0));
        assert!(m.is_exact());
        assert_relative_eq!(m.value(), 0.4, max_relative = 1e-12);
    }

    #[test]
    fn sphere_sublevel_measure_unclipped_2d_disc() {
        // n = 2 central optimum, small alpha: area = pi * 2 alpha.
        let p = SphereProblem::new(vec![0.5, 0.5]).unwrap();
        let alpha = 0.01;
        let m = p.sublevel_measure(alpha, 0, &mut rng(0));
        assert!(m.is_exact());
        assert_relative_eq!(
            m.value(),
            std::f64::consts::PI * 2.0 * alpha,
            max_relative = 1e-12
        );
    }

    #[test]
    fn sphere_sublevel_measure_covering_ball() {
        // Large alpha: the ball swallows the box, so the measure is 1.
        let p = SphereProblem::new(vec![0.5, 0.5]).unwrap();
        let m = p.sublevel_measure(0.9, 0, &mut rng(0));
        assert_eq!(m, MeasureEstimate::Exact(1.0));
        // Radius exactly reaching the far corner still covers.
        let p1 = SphereProblem::new(vec![0.0]).unwrap();
        let m1 = p1.sublevel_measure(1.0, 0, &mut rng(0));
        assert_eq!(m1, MeasureEstimate::Exact(1.0));
    }

    #[test]
    fn sphere_sublevel_measure_clipped_matches_closed_form() {
        // x* at a corner of [0,1]^2: only a quarter disc lies inside.
        let p = SphereProblem::new(vec![0.0, 0.0]).unwrap();
        let alpha = 0.02;
        let m = p.sublevel_measure(alpha, 200_000, &mut rng(11));
        let expected = std::f64::consts::PI * 2.0 * alpha / 4.0;
        match m {
            MeasureEstimate::Approximate { value, std_err } => {
                assert!(std_err > 0.0);
                assert!(
                    (value - expected).abs() <= 4.0 * std_err,
                    "clipped estimate {value} too far from {expected}"
                );
            }
            MeasureEstimate::Exact(_) => panic!("clipped measure should be estimated"),
        }
    }

    #[test]
    fn sphere_membership_agrees_with_eval() {
        let p = SphereProblem::new(vec![0.3, 0.6, 0.5]).unwrap();
        let mut r = rng(3);
        for &alpha in &[0.01, 0.1, 0.5] {
            for _ in 0..10_000 {
                let x = p.bounds().sample(&mut r);
                assert_eq!(
                    p.sublevel_contains(alpha, &x),
                    p.eval(&x).unwrap() <= alpha
                );
            }
        }
    }

    // Rising pieces of the profile, written out literally as an independent
    // statement of the piece layout used by `spike_profile`.
    const RISING: [(f64, f64); 7] = [
        (0.00, 0.10),
        (0.15, 0.25),
        (0.30, 0.40),
        (0.45, 0.55),
        (0.60, 0.70),
        (0.75, 0.85),
        (0.90, 1.00),
    ];

    #[test]
    fn profile_spot_values() {
        assert_relative_eq!(spike_profile(0.05), 0.05, max_relative = 1e-12);
        assert_relative_eq!(spike_profile(0.12), 0.08, max_relative = 1e-12);
        // Boundary r = 0.10 belongs to the rising piece.
        assert_relative_eq!(spike_profile(0.10), 0.10, max_relative = 1e-12);
        assert_relative_eq!(spike_profile(0.15), 0.05, max_relative = 1e-12);
        assert_eq!(spike_profile(0.0), 0.0);
        assert_relative_eq!(spike_profile(1.0), 0.4, max_relative = 1e-12);
    }

    #[test]
    fn profile_piecewise_structure() {
        // On rising pieces the slope is +1 anchored at the piece start;
        // elsewhere the slope is -1 anchored at the next piece start.
        let on_rising = |r: f64| {
            RISING
                .iter()
                .enumerate()
                .find(|(_, (a, b))| r >= *a && r <= *b)
                .map(|(k, _)| k)
        };
        for i in 0..=20_000u32 {
            let r = f64::from(i) / 20_000.0;
            let got = spike_profile(r);
            let want = match on_rising(r) {
                // Rising piece k: value r - k/10.
                Some(k) => r - k as f64 / 10.0,
                // Descending stretch before rising piece k: reflect the
                // line so it meets piece k at its left endpoint 3k/20,
                // giving -r + k/5.
                None => {
                    let k = RISING
                        .iter()
                        .position(|(a, _)| *a > r)
                        .expect("descending stretch always precedes another rise");
                    -r + k as f64 / 5.0
                }
            };
            assert!(
                (got - want).abs() < 1e-12,
                "profile mismatch at r = {r}: got {got}, want {want}"
            );
        }
    }

    #[test]
    fn profile_bounds_and_uniqueness_of_zero() {
        let mut max_seen = f64::MIN;
        for i in 0..=100_000u32 {
            let r = f64::from(i) / 100_000.0;
            let v = spike_profile(r);
            assert!(v <= r + 1e-15, "profile above identity at r = {r}");
            if r == 0.0 {
                assert_eq!(v, 0.0);
            } else {
                assert!(v > 0.0, "profile hit zero at r = {r}");
            }
            max_seen = max_seen.max(v);
        }
        assert_relative_eq!(max_seen, 0.4, max_relative = 1e-12);
    }

    #[test]
    fn profile_has_no_jumps() {
        // One-sided values at every piece boundary differ by at most the
        // step ratio times epsilon; the profile is continuous.
        let eps = 1e-9;
        for (a, b) in RISING {
            for edge in [a, b] {
                let left = if edge > 0.0 {
                    spike_profile(edge - eps)
                } else {
                    spike_profile(0.0)
                };
                let right = if edge < 1.0 {
                    spike_profile(edge + eps)
                } else {
                    spike_profile(1.0)
                };
                assert!(
                    (left - right).abs() <= 2.0 * eps + 1e-12,
                    "jump at boundary {edge}: {left} vs {right}"
                );
            }
        }
    }

    #[test]
    fn spike_eval_examples() {
        let p = SpikeProblem::new(vec![0.0, 0.0]).unwrap();
        assert_eq!(p.eval(&[0.0, 0.0]).unwrap(), 0.0);
        // ||x|| = sqrt(2) * 0.05 / sqrt(2) => r = 0.05 normalized.
        let v = p.eval(&[0.05, 0.05]).unwrap();
        assert_relative_eq!(v, 0.05, max_relative = 1e-12);
        // r = 0.12 lands on the first descending stretch.
        let v = p.eval(&[0.12, 0.12]).unwrap();
        assert_relative_eq!(v, 0.08, max_relative = 1e-12);
        // Out-of-box rejection.
        assert!(p.eval(&[0.6, 0.0]).is_err());
    }

    #[test]
    fn spike_objective_range_and_ball_membership() {
        let p = SpikeProblem::new(vec![0.1, -0.2]).unwrap();
        let mut r = rng(5);
        for _ in 0..20_000 {
            let x = p.bounds().sample(&mut r);
            let y = p.eval(&x).unwrap();
            assert!((0.0..=0.4).contains(&y));
        }
        // Points within normalized radius alpha are in the alpha sublevel,
        // because the profile never exceeds the identity.
        let alpha = 0.03;
        for _ in 0..5_000 {
            let x = p.bounds().sample(&mut r);
            let d = (squared_distance(&x, p.x_star()) / 2.0).sqrt();
            if d <= alpha {
                assert!(p.eval(&x).unwrap() <= alpha);
            }
        }
    }

    #[test]
    fn spike_bracket_contains_mc_measure() {
        let p = SpikeProblem::new(vec![0.0, 0.0]).unwrap();
        let alpha = 1.0 / 256.0;
        let (lo, hi) = p.sublevel_bracket(alpha);
        assert!(lo > 0.0 && lo < hi);
        let m = p.sublevel_measure(alpha, 4_000_000, &mut rng(17));
        let v = m.value();
        let slack = 4.0 * m.std_err();
        assert!(
            v + slack >= lo && v - slack <= hi,
            "MC measure {v} outside bracket [{lo}, {hi}]"
        );
    }

    #[test]
    fn seeded_problems_are_reproducible() {
        let a = SphereProblem::seeded(3, &mut rng(42)).unwrap();
        let b = SphereProblem::seeded(3, &mut rng(42)).unwrap();
        assert_eq!(a.x_star(), b.x_star());
        let c = SpikeProblem::seeded(4, &mut rng(42)).unwrap();
        assert!(c.bounds().contains(c.x_star()));
    }

    proptest! {
        #[test]
        fn sphere_values_stay_in_unit_interval(
            xs in proptest::collection::vec(0.0f64..=1.0, 1..=6),
            star in proptest::collection::vec(0.0f64..=1.0, 1..=6),
        ) {
            let n = xs.len().min(star.len());
            let p = SphereProblem::new(star[..n].to_vec()).unwrap();
            let y = p.eval(&xs[..n]).unwrap();
            prop_assert!((0.0..=1.0).contains(&y));
        }

        #[test]
        fn spike_profile_within_bounds(r in 0.0f64..=1.0) {
            let v = spike_profile(r);
            prop_assert!(v >= 0.0);
            prop_assert!(v <= r + 1e-15);
            prop_assert!(v <= 0.4 + 1e-15);
        }
    }
}
