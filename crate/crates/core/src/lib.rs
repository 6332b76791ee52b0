//! Classification-guided stochastic optimization on box domains.
//!
//! The library minimizes black-box objectives by alternating between
//! sampling and learning: each round labels the previous batch against a
//! shrinking threshold, fits a ball-shaped region around the good points,
//! and draws the next batch from a mixture of that region and the uniform
//! distribution over the search box. Alongside the optimizer it ships
//!
//! * benchmark problems with analytically known sublevel-set geometry
//!   ([`problems`]),
//! * ball sampling and Monte Carlo measure utilities ([`geometry`]),
//! * the region learners and their training diagnostics ([`learners`]),
//! * the optimization loop itself with exact query accounting ([`engine`]),
//! * closed-form query-complexity and generalization bounds ([`theory`]),
//! * and an experiment harness that estimates first-hit quantiles
//!   empirically and compares them against the bounds ([`harness`]).
//!
//! Every run is reproducible: all randomness flows from a single master
//! seed through per-trial counter-derived streams, so results are
//! byte-identical across repeat invocations and worker counts.

pub mod engine;
pub mod geometry;
pub mod harness;
pub mod learners;
pub mod problems;
pub mod theory;
