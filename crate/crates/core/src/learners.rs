//! Threshold labeling and ball-shaped region learners.
//!
//! A learner receives one batch of labeled points and produces a
//! [`SphereHypothesis`] — a ball meant to capture where the positively
//! labeled points live. Two learners are provided:
//!
//! * [`EnclosingBallLearner`]: the minimum enclosing ball of the positive
//!   points. Exact for batches up to a size threshold, core-set
//!   approximation with a tight radius guarantee beyond it.
//! * [`OneSideBallLearner`]: the enclosing ball shrunk until no negative
//!   point remains inside, so the hypothesis only errs by missing
//!   positives, never by claiming negatives.
//!
//! Learners are deterministic functions of the batch: they draw no
//! external randomness, so optimizer runs that share a seed stay
//! reproducible regardless of how the learner is implemented internally.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geometry::Ball;

/// An evaluated point: location and objective value.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    /// Location in the domain.
    pub x: Vec<f64>,
    /// Objective value at `x`.
    pub y: f64,
}

/// Binary label of a sample relative to a threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    /// Objective value at or below the threshold.
    Positive,
    /// Objective value above the threshold.
    Negative,
}

/// A point with its threshold label.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    /// Location in the domain.
    pub x: Vec<f64>,
    /// Label against the batch threshold.
    pub label: Label,
}

/// Labels each sample positive iff its value is at or below `threshold`.
///
/// The boundary belongs to the positive class: a value exactly equal to
/// the threshold is labeled [`Label::Positive`].
pub fn label_samples(samples: &[Sample], threshold: f64) -> Vec<LabeledSample> {
    samples
        .iter()
        .map(|s| LabeledSample {
            x: s.x.clone(),
            label: if s.y <= threshold {
                Label::Positive
            } else {
                Label::Negative
            },
        })
        .collect()
}

/// Errors from fitting a hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum LearnError {
    /// The batch is empty.
    #[error("cannot fit a hypothesis to an empty batch")]
    EmptyBatch,
    /// No sample in the batch is labeled positive.
    #[error("batch contains no positive samples")]
    NoPositives,
    /// Samples in the batch disagree on dimension.
    #[error("batch samples disagree on dimension")]
    DimensionMismatch,
}

/// Which learner produced a hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LearnerKind {
    /// Minimum enclosing ball of the positives.
    EnclosingBall,
    /// Enclosing ball shrunk to exclude all negatives.
    OneSideBall,
}

/// A ball-shaped classification hypothesis.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereHypothesis {
    /// The region claimed positive.
    pub ball: Ball,
    /// Which learner produced it.
    pub kind: LearnerKind,
    /// Optimizer iteration that produced it (0 when fit standalone).
    pub iteration: usize,
}

impl SphereHypothesis {
    /// Whether the hypothesis claims `x` positive.
    pub fn contains(&self, x: &[f64]) -> bool {
        self.ball.contains(x)
    }

    /// Classifies a point.
    pub fn classify(&self, x: &[f64]) -> Label {
        if self.contains(x) {
            Label::Positive
        } else {
            Label::Negative
        }
    }
}

/// Fits ball hypotheses from labeled batches.
///
/// This is the extension point for plugging in other region shapes or
/// fitting strategies: the optimizer only relies on this interface plus
/// the hypothesis ball it returns.
pub trait Learner: Send + Sync {
    /// Fits a hypothesis to one labeled batch.
    fn fit(&self, batch: &[LabeledSample]) -> Result<SphereHypothesis, LearnError>;

    /// Which kind of hypothesis [`fit`](Learner::fit) produces.
    fn kind(&self) -> LearnerKind;
}

/// Fraction of the batch the hypothesis misclassifies.
pub fn training_error(hypothesis: &SphereHypothesis, batch: &[LabeledSample]) -> f64 {
    assert!(!batch.is_empty(), "training error needs a non-empty batch");
    let wrong = batch
        .iter()
        .filter(|s| hypothesis.classify(&s.x) != s.label)
        .count();
    wrong as f64 / batch.len() as f64
}

/// Batch size up to which the enclosing ball is computed exactly.
pub const MEB_EXACT_THRESHOLD: usize = 1000;

/// Radius guarantee of the core-set path: at most `1 + MEB_APPROX_EPSILON`
/// times the optimal radius.
pub const MEB_APPROX_EPSILON: f64 = 1e-6;

/// Minimum enclosing ball with the default exactness threshold.
///
/// See [`min_enclosing_ball_with`].
pub fn min_enclosing_ball(points: &[Vec<f64>]) -> Ball {
    min_enclosing_ball_with(points, MEB_EXACT_THRESHOLD, MEB_APPROX_EPSILON)
}

/// Minimum enclosing ball of a non-empty point set.
///
/// Up to `exact_threshold` distinct points, runs the randomized
/// move-to-back recursion over support sets, which returns the exact
/// optimum. Beyond the threshold, grows a core set (repeatedly adding the
/// farthest outlier and re-solving exactly on the core) until every point
/// is within `1 + epsilon` of the core ball's radius. In both cases the
/// returned radius is the exact maximum distance from the solved center,
/// so the ball encloses every input point by construction.
///
/// Deterministic: the internal shuffle uses a fixed seed, so identical
/// inputs give bit-identical balls.
pub fn min_enclosing_ball_with(points: &[Vec<f64>], exact_threshold: usize, epsilon: f64) -> Ball {
    assert!(!points.is_empty(), "enclosing ball needs at least one point");
    let dim = points[0].len();
    assert!(dim >= 1, "points must have dimension >= 1");
    assert!(
        points.iter().all(|p| p.len() == dim),
        "points disagree on dimension"
    );

    // Exact duplicates contribute nothing; removing them keeps the
    // recursion's support sets affinely independent in the common case.
    let mut seen = HashSet::with_capacity(points.len());
    let unique: Vec<&[f64]> = points
        .iter()
        .filter(|p| seen.insert(p.iter().map(|v| v.to_bits()).collect::<Vec<u64>>()))
        .map(Vec::as_slice)
        .collect();

    let center = if unique.len() <= exact_threshold {
        exact_center(&unique)
    } else {
        coreset_center(&unique, epsilon)
    };
    let radius = max_distance(&center, &unique);
    Ball::new(center, radius)
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn max_distance(center: &[f64], points: &[&[f64]]) -> f64 {
    points
        .iter()
        .map(|p| dist2(center, p))
        .fold(0.0f64, f64::max)
        .sqrt()
}

/// Center of the exact minimum enclosing ball of distinct points.
fn exact_center(points: &[&[f64]]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    // Fixed seed: determinism matters more than adversarial robustness
    // here, and inputs are continuous samples with no adversary.
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(0x4d45_4221);
    order.shuffle(&mut shuffle_rng);
    let mut support = Vec::with_capacity(points[0].len() + 1);
    match welzl(points, &order, order.len(), &mut support) {
        Some((center, _)) => center,
        // Unreachable for non-empty input, but a single point is always a
        // valid center.
        None => points[0].to_vec(),
    }
}

/// Recursive move-to-back search over support sets.
///
/// Returns the center and squared radius of the smallest ball enclosing
/// the first `end` points of `order` with all of `support` on its surface.
fn welzl(
    points: &[&[f64]],
    order: &[usize],
    end: usize,
    support: &mut Vec<usize>,
) -> Option<(Vec<f64>, f64)> {
    let dim = points[0].len();
    if end == 0 || support.len() == dim + 1 {
        return circumball(points, support);
    }
    let p = order[end - 1];
    let ball = welzl(points, order, end - 1, support);
    if let Some((center, r2)) = &ball {
        let tol = 1e-12 * (1.0 + r2);
        if dist2(points[p], center) <= r2 + tol {
            return ball;
        }
    }
    support.push(p);
    let forced = welzl(points, order, end - 1, support);
    support.pop();
    forced
}

/// Smallest ball with every support point on its surface.
///
/// Solves the linear system expressing equidistance from the support
/// points. If the system is singular (support is affinely dependent, which
/// only arises from floating-point coincidences), the latest support point
/// is dropped and the smaller system solved instead.
fn circumball(points: &[&[f64]], support: &[usize]) -> Option<(Vec<f64>, f64)> {
    let mut k = support.len();
    while k > 0 {
        let base = points[support[0]];
        let dim = base.len();
        if k == 1 {
            return Some((base.to_vec(), 0.0));
        }
        // Unknowns: coefficients of center - base in the span of
        // v_i = p_i - base. Equidistance gives 2 v_i . (center - base)
        // = |v_i|^2, i.e. the Gram system (2 v_i . v_j) lambda = |v_i|^2.
        let vs: Vec<Vec<f64>> = support[1..k]
            .iter()
            .map(|&i| {
                points[i]
                    .iter()
                    .zip(base)
                    .map(|(a, b)| a - b)
                    .collect::<Vec<f64>>()
            })
            .collect();
        let m = k - 1;
        let mut a = vec![vec![0.0f64; m]; m];
        let mut b = vec![0.0f64; m];
        for i in 0..m {
            for j in 0..m {
                a[i][j] = 2.0 * vs[i].iter().zip(&vs[j]).map(|(x, y)| x * y).sum::<f64>();
            }
            b[i] = vs[i].iter().map(|v| v * v).sum();
        }
        if let Some(lambda) = solve_linear(&mut a, &mut b) {
            let mut center = base.to_vec();
            for (l, v) in lambda.iter().zip(&vs) {
                for (c, vi) in center.iter_mut().zip(v).take(dim) {
                    *c += l * vi;
                }
            }
            let r2 = dist2(&center, base);
            return Some((center, r2));
        }
        k -= 1;
    }
    None
}

/// Gaussian elimination with partial pivoting; `None` when singular.
fn solve_linear(a: &mut [Vec<f64>], b: &mut [f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let scale: f64 = a
        .iter()
        .flat_map(|row| row.iter())
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
        .max(1.0);
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        if a[pivot_row][col].abs() <= 1e-12 * scale {
            return None;
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                a[row][c] -= f * a[col][c];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0f64; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for col in row + 1..n {
            acc -= a[row][col] * x[col];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

/// Core-set refinement for large point sets.
///
/// Seeds the core with a farthest pair, then repeatedly solves exactly on
/// the core and adds the farthest outlier until every point is within
/// `1 + epsilon` of the core ball's radius.
fn coreset_center(points: &[&[f64]], epsilon: f64) -> Vec<f64> {
    assert!(epsilon > 0.0, "core-set tolerance must be positive");
    let far_from = |anchor: &[f64]| -> usize {
        points
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| {
                dist2(anchor, a).partial_cmp(&dist2(anchor, b)).unwrap()
            })
            .map(|(i, _)| i)
            .unwrap()
    };
    let first = far_from(points[0]);
    let second = far_from(points[first]);
    let mut in_core = vec![false; points.len()];
    let mut core: Vec<&[f64]> = Vec::new();
    for idx in [first, second] {
        if !in_core[idx] {
            in_core[idx] = true;
            core.push(points[idx]);
        }
    }
    loop {
        let center = exact_center(&core);
        let core_radius = max_distance(&center, &core);
        let (far_idx, far_d2) = points
            .iter()
            .enumerate()
            .map(|(i, p)| (i, dist2(&center, p)))
            .max_by(|(_, a), (_, b)| a.partial_cmp(b).unwrap())
            .unwrap();
        if far_d2.sqrt() <= core_radius * (1.0 + epsilon) || in_core[far_idx] {
            return center;
        }
        in_core[far_idx] = true;
        core.push(points[far_idx]);
    }
}

/// Learns the minimum enclosing ball of the positive samples.
#[derive(Debug, Clone)]
pub struct EnclosingBallLearner {
    /// Batch size up to which the ball is exact.
    pub exact_threshold: usize,
    /// Radius slack of the core-set path beyond the threshold.
    pub epsilon: f64,
}

impl Default for EnclosingBallLearner {
    fn default() -> Self {
        Self {
            exact_threshold: MEB_EXACT_THRESHOLD,
            epsilon: MEB_APPROX_EPSILON,
        }
    }
}

impl EnclosingBallLearner {
    fn positive_points(batch: &[LabeledSample]) -> Result<Vec<Vec<f64>>, LearnError> {
        if batch.is_empty() {
            return Err(LearnError::EmptyBatch);
        }
        let dim = batch[0].x.len();
        if batch.iter().any(|s| s.x.len() != dim) {
            return Err(LearnError::DimensionMismatch);
        }
        let positives: Vec<Vec<f64>> = batch
            .iter()
            .filter(|s| s.label == Label::Positive)
            .map(|s| s.x.clone())
            .collect();
        if positives.is_empty() {
            return Err(LearnError::NoPositives);
        }
        Ok(positives)
    }
}

impl Learner for EnclosingBallLearner {
    fn fit(&self, batch: &[LabeledSample]) -> Result<SphereHypothesis, LearnError> {
        let positives = Self::positive_points(batch)?;
        let ball = min_enclosing_ball_with(&positives, self.exact_threshold, self.epsilon);
        Ok(SphereHypothesis {
            ball,
            kind: LearnerKind::EnclosingBall,
            iteration: 0,
        })
    }

    fn kind(&self) -> LearnerKind {
        LearnerKind::EnclosingBall
    }
}

/// Learns an enclosing ball shrunk until no negative sample is inside.
///
/// Starts from the minimum enclosing ball of the positives; if any
/// negative falls inside, the radius is reduced to `(1 - margin)` times
/// the distance from the center to the nearest such negative, so the
/// hypothesis strictly excludes every negative in the batch.
#[derive(Debug, Clone)]
pub struct OneSideBallLearner {
    /// Relative gap kept between the radius and the nearest negative.
    pub margin: f64,
    /// The enclosing-ball learner used for the initial fit.
    pub inner: EnclosingBallLearner,
}

impl Default for OneSideBallLearner {
    fn default() -> Self {
        Self {
            margin: 1e-9,
            inner: EnclosingBallLearner::default(),
        }
    }
}

impl Learner for OneSideBallLearner {
    fn fit(&self, batch: &[LabeledSample]) -> Result<SphereHypothesis, LearnError> {
        let mut hypothesis = self.inner.fit(batch)?;
        let nearest_negative = batch
            .iter()
            .filter(|s| s.label == Label::Negative)
            .map(|s| dist2(&hypothesis.ball.center, &s.x))
            .fold(f64::INFINITY, f64::min)
            .sqrt();
        if nearest_negative <= hypothesis.ball.radius {
            hypothesis.ball.radius = (1.0 - self.margin) * nearest_negative;
        }
        hypothesis.kind = LearnerKind::OneSideBall;
        Ok(hypothesis)
    }

    fn kind(&self) -> LearnerKind {
        LearnerKind::OneSideBall
    }
}
