//! C interface to the salopt optimizer.
//!
//! Every object crosses the boundary as an opaque handle that the
//! caller frees with the matching `_free` function; every fallible call
//! returns a [`SaloptStatus`]. No Rust panic ever crosses the boundary:
//! arguments are validated up front and runs execute under a panic
//! guard. The companion header `include/salopt.h` is regenerated on
//! every build.

use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use salopt::engine::{default_schedule, run_sac, run_uniform, EngineError, RunResult, SchedulePreset};
use salopt::problems::{Problem, SphereProblem, SpikeProblem};
use salopt::theory::{
    ball_class_vc_dim, mixture_query_bound, sample_size_for_error, uniform_first_hit_quantile,
    BoundValue, UniformComplexity,
};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SaloptStatus {
    /// The call succeeded.
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// An argument was out of range or inconsistent.
    InvalidArgument = 2,
    /// The run failed internally.
    RunFailed = 3,
    /// A caller-provided buffer was too small.
    BufferTooSmall = 4,
}

/// Schedule preset for mixture runs.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SaloptPreset {
    /// Halving thresholds with an enclosing-ball learner.
    Enclosing = 1,
    /// Halving thresholds with a one-side ball learner.
    OneSide = 2,
}

/// An objective on a box domain. Opaque.
pub struct SaloptProblem {
    inner: Box<dyn Problem>,
}

/// A finished run. Opaque.
pub struct SaloptRun {
    inner: RunResult,
}

/// Interface version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn salopt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Static name of a status code, NUL-terminated.
#[no_mangle]
pub extern "C" fn salopt_status_name(status: SaloptStatus) -> *const c_char {
    let name: &'static str = match status {
        SaloptStatus::Ok => "ok\0",
        SaloptStatus::NullArgument => "null argument\0",
        SaloptStatus::InvalidArgument => "invalid argument\0",
        SaloptStatus::RunFailed => "run failed\0",
        SaloptStatus::BufferTooSmall => "buffer too small\0",
    };
    name.as_ptr() as *const c_char
}

unsafe fn new_problem(
    x_star: *const f64,
    dim: usize,
    out: *mut *mut SaloptProblem,
    build: impl Fn(Vec<f64>) -> Result<Box<dyn Problem>, salopt::problems::ProblemError>,
) -> SaloptStatus {
    if x_star.is_null() || out.is_null() {
        return SaloptStatus::NullArgument;
    }
    if dim == 0 {
        return SaloptStatus::InvalidArgument;
    }
    let coords = std::slice::from_raw_parts(x_star, dim).to_vec();
    if coords.iter().any(|c| !c.is_finite()) {
        return SaloptStatus::InvalidArgument;
    }
    match build(coords) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(SaloptProblem { inner }));
            SaloptStatus::Ok
        }
        Err(_) => SaloptStatus::InvalidArgument,
    }
}

/// Creates the mean-squared-distance objective on the unit box, with
/// its optimum at `x_star` (all coordinates in `[0, 1]`).
///
/// # Safety
///
/// `x_star` must point to `dim` readable doubles and `out` to a
/// writable pointer slot. On `Ok` the caller owns the handle and must
/// release it with [`salopt_problem_free`].
#[no_mangle]
pub unsafe extern "C" fn salopt_sphere_new(
    x_star: *const f64,
    dim: usize,
    out: *mut *mut SaloptProblem,
) -> SaloptStatus {
    new_problem(x_star, dim, out, |c| {
        SphereProblem::new(c).map(|p| Box::new(p) as Box<dyn Problem>)
    })
}

/// Creates the sawtooth distance-profile objective on the centered box,
/// with its optimum at `x_star` (all coordinates in `[-1/2, 1/2]`).
///
/// # Safety
///
/// `x_star` must point to `dim` readable doubles and `out` to a
/// writable pointer slot. On `Ok` the caller owns the handle and must
/// release it with [`salopt_problem_free`].
#[no_mangle]
pub unsafe extern "C" fn salopt_spike_new(
    x_star: *const f64,
    dim: usize,
    out: *mut *mut SaloptProblem,
) -> SaloptStatus {
    new_problem(x_star, dim, out, |c| {
        SpikeProblem::new(c).map(|p| Box::new(p) as Box<dyn Problem>)
    })
}

/// Releases a problem handle. Null is a no-op.
///
/// # Safety
///
/// `problem` must be a handle from a `salopt_*_new` call, not yet
/// freed, or null.
#[no_mangle]
pub unsafe extern "C" fn salopt_problem_free(problem: *mut SaloptProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Domain dimension of a problem; 0 for null.
///
/// # Safety
///
/// `problem` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn salopt_problem_dim(problem: *const SaloptProblem) -> usize {
    match problem.as_ref() {
        Some(p) => p.inner.dim(),
        None => 0,
    }
}

/// Evaluates the objective at `x`, writing the value to `out`.
///
/// # Safety
///
/// `problem` must be a live handle, `x` must point to `len` readable
/// doubles, and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn salopt_problem_eval(
    problem: *const SaloptProblem,
    x: *const f64,
    len: usize,
    out: *mut f64,
) -> SaloptStatus {
    let Some(p) = problem.as_ref() else {
        return SaloptStatus::NullArgument;
    };
    if x.is_null() || out.is_null() {
        return SaloptStatus::NullArgument;
    }
    let point = std::slice::from_raw_parts(x, len);
    match p.inner.eval(point) {
        Ok(v) => {
            *out = v;
            SaloptStatus::Ok
        }
        Err(_) => SaloptStatus::InvalidArgument,
    }
}

fn engine_status(err: &EngineError) -> SaloptStatus {
    match err {
        EngineError::InvalidConfig(_) => SaloptStatus::InvalidArgument,
        _ => SaloptStatus::RunFailed,
    }
}

unsafe fn finish_run(
    result: Result<Result<RunResult, EngineError>, Box<dyn std::any::Any + Send>>,
    out: *mut *mut SaloptRun,
) -> SaloptStatus {
    match result {
        Ok(Ok(inner)) => {
            *out = Box::into_raw(Box::new(SaloptRun { inner }));
            SaloptStatus::Ok
        }
        Ok(Err(e)) => engine_status(&e),
        Err(_) => SaloptStatus::RunFailed,
    }
}

/// Runs uniform search on `problem` until the objective first reaches
/// `alpha_star` (when `stop_on_hit`) or the budget is spent.
///
/// The run draws from the stream `stream` of the generator seeded with
/// `seed`; distinct streams give independent trials reproducibly.
///
/// # Safety
///
/// `problem` must be a live handle and `out` a writable pointer slot.
/// On `Ok` the caller owns the run handle and must release it with
/// [`salopt_run_free`].
#[no_mangle]
pub unsafe extern "C" fn salopt_run_uniform(
    problem: *const SaloptProblem,
    alpha_star: f64,
    budget: u64,
    seed: u64,
    stream: u64,
    stop_on_hit: bool,
    out: *mut *mut SaloptRun,
) -> SaloptStatus {
    let Some(p) = problem.as_ref() else {
        return SaloptStatus::NullArgument;
    };
    if out.is_null() {
        return SaloptStatus::NullArgument;
    }
    let result = catch_unwind(AssertUnwindSafe(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        run_uniform(p.inner.as_ref(), budget, alpha_star, &mut rng, stop_on_hit)
    }));
    finish_run(result, out)
}

/// Runs the classification-guided mixture optimizer with a preset
/// schedule for `alpha_star`.
///
/// Overrides replace parts of the preset: `lambda_override` when it is
/// a probability (pass NaN to keep the preset), `m0_override` and
/// `batch_override` when nonzero.
///
/// # Safety
///
/// `problem` must be a live handle and `out` a writable pointer slot.
/// On `Ok` the caller owns the run handle and must release it with
/// [`salopt_run_free`].
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn salopt_run_mixture(
    problem: *const SaloptProblem,
    alpha_star: f64,
    preset: SaloptPreset,
    lambda_override: f64,
    m0_override: u64,
    batch_override: u64,
    seed: u64,
    stream: u64,
    stop_on_hit: bool,
    out: *mut *mut SaloptRun,
) -> SaloptStatus {
    let Some(p) = problem.as_ref() else {
        return SaloptStatus::NullArgument;
    };
    if out.is_null() {
        return SaloptStatus::NullArgument;
    }
    if !(alpha_star > 0.0 && alpha_star < 1.0) {
        return SaloptStatus::InvalidArgument;
    }
    if !lambda_override.is_nan() && !(0.0..=1.0).contains(&lambda_override) {
        return SaloptStatus::InvalidArgument;
    }
    let preset = match preset {
        SaloptPreset::Enclosing => SchedulePreset::Enclosing,
        SaloptPreset::OneSide => SchedulePreset::OneSide,
    };
    let mut cfg = default_schedule(alpha_star, p.inner.dim(), preset);
    if !lambda_override.is_nan() {
        cfg.lambda = lambda_override;
    }
    if m0_override > 0 {
        cfg.m0 = m0_override as usize;
    }
    if batch_override > 0 {
        cfg.batch_sizes = vec![batch_override as usize; cfg.schedule.len()];
    }
    let result = catch_unwind(AssertUnwindSafe(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        run_sac(p.inner.as_ref(), &cfg, &mut rng, stop_on_hit)
    }));
    finish_run(result, out)
}

/// Releases a run handle. Null is a no-op.
///
/// # Safety
///
/// `run` must be a handle from a `salopt_run_*` call, not yet freed,
/// or null.
#[no_mangle]
pub unsafe extern "C" fn salopt_run_free(run: *mut SaloptRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Total objective evaluations the run spent; 0 for null.
///
/// # Safety
///
/// `run` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn salopt_run_total_queries(run: *const SaloptRun) -> u64 {
    match run.as_ref() {
        Some(r) => r.inner.total_queries,
        None => 0,
    }
}

/// Best objective value the run saw; NaN for null.
///
/// # Safety
///
/// `run` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn salopt_run_best_value(run: *const SaloptRun) -> f64 {
    match run.as_ref() {
        Some(r) => r.inner.best_value,
        None => f64::NAN,
    }
}

/// Writes the 1-based index of the first query at or below the target
/// level and returns true; returns false when the run never hit (or on
/// null arguments).
///
/// # Safety
///
/// `run` must be a live handle or null; `out` must be writable or null.
#[no_mangle]
pub unsafe extern "C" fn salopt_run_first_hit(run: *const SaloptRun, out: *mut u64) -> bool {
    let Some(r) = run.as_ref() else {
        return false;
    };
    match (r.inner.first_hit, out.is_null()) {
        (Some(hit), false) => {
            *out = hit;
            true
        }
        (Some(_), true) => true,
        (None, _) => false,
    }
}

/// Domain dimension of the run's best point; 0 for null.
///
/// # Safety
///
/// `run` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn salopt_run_dim(run: *const SaloptRun) -> usize {
    match run.as_ref() {
        Some(r) => r.inner.best_point.len(),
        None => 0,
    }
}

/// Copies the best point into `buf` (at least [`salopt_run_dim`] slots).
///
/// # Safety
///
/// `run` must be a live handle; `buf` must point to `len` writable
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn salopt_run_best_point(
    run: *const SaloptRun,
    buf: *mut f64,
    len: usize,
) -> SaloptStatus {
    let Some(r) = run.as_ref() else {
        return SaloptStatus::NullArgument;
    };
    if buf.is_null() {
        return SaloptStatus::NullArgument;
    }
    let point = &r.inner.best_point;
    if len < point.len() {
        return SaloptStatus::BufferTooSmall;
    }
    std::ptr::copy_nonoverlapping(point.as_ptr(), buf, point.len());
    SaloptStatus::Ok
}

/// Length of the best-so-far trace (one entry per query); 0 for null.
///
/// # Safety
///
/// `run` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn salopt_run_trace_len(run: *const SaloptRun) -> u64 {
    match run.as_ref() {
        Some(r) => r.inner.best_trace.len() as u64,
        None => 0,
    }
}

/// Copies the best-so-far trace into `buf` (at least
/// [`salopt_run_trace_len`] slots).
///
/// # Safety
///
/// `run` must be a live handle; `buf` must point to `len` writable
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn salopt_run_trace(
    run: *const SaloptRun,
    buf: *mut f64,
    len: usize,
) -> SaloptStatus {
    let Some(r) = run.as_ref() else {
        return SaloptStatus::NullArgument;
    };
    if buf.is_null() {
        return SaloptStatus::NullArgument;
    }
    let trace = &r.inner.best_trace;
    if len < trace.len() {
        return SaloptStatus::BufferTooSmall;
    }
    std::ptr::copy_nonoverlapping(trace.as_ptr(), buf, trace.len());
    SaloptStatus::Ok
}

/// Dimension of the ball hypothesis class over an `dim`-dimensional
/// domain: `dim + 1`.
#[no_mangle]
pub extern "C" fn salopt_ball_class_vc_dim(dim: usize) -> usize {
    ball_class_vc_dim(dim)
}

/// Smallest sample size whose zero-training-error bound is at or below
/// `target`, written to `out`.
///
/// # Safety
///
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn salopt_sample_size_for_error(
    target: f64,
    vc_dim: usize,
    eta: f64,
    out: *mut u64,
) -> SaloptStatus {
    if out.is_null() {
        return SaloptStatus::NullArgument;
    }
    if !(target > 0.0) || vc_dim == 0 || !(eta > 0.0 && eta < 1.0) {
        return SaloptStatus::InvalidArgument;
    }
    *out = sample_size_for_error(target, vc_dim, eta);
    SaloptStatus::Ok
}

/// First-hit quantile of uniform search at hit rate `pr` and failure
/// level `delta`: the smooth form goes to `ln_form`, the exact
/// geometric quantile to `exact`. A zero hit rate yields `ln_form` of
/// infinity and `exact` of `UINT64_MAX`.
///
/// # Safety
///
/// `ln_form` and `exact` must be writable.
#[no_mangle]
pub unsafe extern "C" fn salopt_uniform_first_hit_quantile(
    pr: f64,
    delta: f64,
    ln_form: *mut f64,
    exact: *mut u64,
) -> SaloptStatus {
    if ln_form.is_null() || exact.is_null() {
        return SaloptStatus::NullArgument;
    }
    if !(0.0..=1.0).contains(&pr) || !(delta > 0.0 && delta < 1.0) {
        return SaloptStatus::InvalidArgument;
    }
    match uniform_first_hit_quantile(pr, delta) {
        UniformComplexity::Finite {
            ln_form: lf,
            exact_quantile,
        } => {
            *ln_form = lf;
            *exact = exact_quantile;
        }
        UniformComplexity::Infinite => {
            *ln_form = f64::INFINITY;
            *exact = u64::MAX;
        }
    }
    SaloptStatus::Ok
}

/// Query bound of the mixture sampler, written to `out`; infinity when
/// both mixture components have hit rate 0.
///
/// # Safety
///
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn salopt_mixture_query_bound(
    pr_u: f64,
    pr_h_bar: f64,
    lambda: f64,
    delta: f64,
    m0: u64,
    m_total: u64,
    out: *mut f64,
) -> SaloptStatus {
    if out.is_null() {
        return SaloptStatus::NullArgument;
    }
    if !(0.0..=1.0).contains(&pr_u)
        || !(0.0..=1.0).contains(&pr_h_bar)
        || !(0.0..=1.0).contains(&lambda)
        || !(delta > 0.0 && delta < 1.0)
    {
        return SaloptStatus::InvalidArgument;
    }
    *out = match mixture_query_bound(pr_u, pr_h_bar, lambda, delta, m0, m_total) {
        BoundValue::Finite(v) => v,
        BoundValue::Infinite => f64::INFINITY,
    };
    SaloptStatus::Ok
}
