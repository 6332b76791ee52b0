#ifndef SALOPT_H
#define SALOPT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum {
  // The call succeeded.
  SALOPT_STATUS_OK = 0,
  // A required pointer argument was null.
  SALOPT_STATUS_NULL_ARGUMENT = 1,
  // An argument was out of range or inconsistent.
  SALOPT_STATUS_INVALID_ARGUMENT = 2,
  // The run failed internally.
  SALOPT_STATUS_RUN_FAILED = 3,
  // A caller-provided buffer was too small.
  SALOPT_STATUS_BUFFER_TOO_SMALL = 4,
} SaloptStatus;

// Schedule preset for mixture runs.
typedef enum {
  // Halving thresholds with an enclosing-ball learner.
  SALOPT_PRESET_ENCLOSING = 1,
  // Halving thresholds with a one-side ball learner.
  SALOPT_PRESET_ONE_SIDE = 2,
} SaloptPreset;

// An objective on a box domain. Opaque.
typedef struct SaloptProblem SaloptProblem;

// A finished run. Opaque.
typedef struct SaloptRun SaloptRun;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Interface version, a static NUL-terminated string.
const char *salopt_version(void);

// Static name of a status code, NUL-terminated.
const char *salopt_status_name(SaloptStatus status);

// Creates the mean-squared-distance objective on the unit box, with
// its optimum at `x_star` (all coordinates in `[0, 1]`).
//
// # Safety
//
// `x_star` must point to `dim` readable doubles and `out` to a
// writable pointer slot. On `Ok` the caller owns the handle and must
// release it with [`salopt_problem_free`].
SaloptStatus salopt_sphere_new(const double *x_star, size_t dim, SaloptProblem **out);

// Creates the sawtooth distance-profile objective on the centered box,
// with its optimum at `x_star` (all coordinates in `[-1/2, 1/2]`).
//
// # Safety
//
// `x_star` must point to `dim` readable doubles and `out` to a
// writable pointer slot. On `Ok` the caller owns the handle and must
// release it with [`salopt_problem_free`].
SaloptStatus salopt_spike_new(const double *x_star, size_t dim, SaloptProblem **out);

// Releases a problem handle. Null is a no-op.
//
// # Safety
//
// `problem` must be a handle from a `salopt_*_new` call, not yet
// freed, or null.
void salopt_problem_free(SaloptProblem *problem);

// Domain dimension of a problem; 0 for null.
//
// # Safety
//
// `problem` must be a live handle or null.
size_t salopt_problem_dim(const SaloptProblem *problem);

// Evaluates the objective at `x`, writing the value to `out`.
//
// # Safety
//
// `problem` must be a live handle, `x` must point to `len` readable
// doubles, and `out` must be writable.
SaloptStatus salopt_problem_eval(const SaloptProblem *problem,
                                 const double *x,
                                 size_t len,
                                 double *out);

// Runs uniform search on `problem` until the objective first reaches
// `alpha_star` (when `stop_on_hit`) or the budget is spent.
//
// The run draws from the stream `stream` of the generator seeded with
// `seed`; distinct streams give independent trials reproducibly.
//
// # Safety
//
// `problem` must be a live handle and `out` a writable pointer slot.
// On `Ok` the caller owns the run handle and must release it with
// [`salopt_run_free`].
SaloptStatus salopt_run_uniform(const SaloptProblem *problem,
                                double alpha_star,
                                uint64_t budget,
                                uint64_t seed,
                                uint64_t stream,
                                bool stop_on_hit,
                                SaloptRun **out);

// Runs the classification-guided mixture optimizer with a preset
// schedule for `alpha_star`.
//
// Overrides replace parts of the preset: `lambda_override` when it is
// a probability (pass NaN to keep the preset), `m0_override` and
// `batch_override` when nonzero.
//
// # Safety
//
// `problem` must be a live handle and `out` a writable pointer slot.
// On `Ok` the caller owns the run handle and must release it with
// [`salopt_run_free`].
SaloptStatus salopt_run_mixture(const SaloptProblem *problem,
                                double alpha_star,
                                SaloptPreset preset,
                                double lambda_override,
                                uint64_t m0_override,
                                uint64_t batch_override,
                                uint64_t seed,
                                uint64_t stream,
                                bool stop_on_hit,
                                SaloptRun **out);

// Releases a run handle. Null is a no-op.
//
// # Safety
//
// `run` must be a handle from a `salopt_run_*` call, not yet freed,
// or null.
void salopt_run_free(SaloptRun *run);

// Total objective evaluations the run spent; 0 for null.
//
// # Safety
//
// `run` must be a live handle or null.
uint64_t salopt_run_total_queries(const SaloptRun *run);

// Best objective value the run saw; NaN for null.
//
// # Safety
//
// `run` must be a live handle or null.
double salopt_run_best_value(const SaloptRun *run);

// Writes the 1-based index of the first query at or below the target
// level and returns true; returns false when the run never hit (or on
// null arguments).
//
// # Safety
//
// `run` must be a live handle or null; `out` must be writable or null.
bool salopt_run_first_hit(const SaloptRun *run, uint64_t *out);

// Domain dimension of the run's best point; 0 for null.
//
// # Safety
//
// `run` must be a live handle or null.
size_t salopt_run_dim(const SaloptRun *run);

// Copies the best point into `buf` (at least [`salopt_run_dim`] slots).
//
// # Safety
//
// `run` must be a live handle; `buf` must point to `len` writable
// doubles.
SaloptStatus salopt_run_best_point(const SaloptRun *run, double *buf, size_t len);

// Length of the best-so-far trace (one entry per query); 0 for null.
//
// # Safety
//
// `run` must be a live handle or null.
uint64_t salopt_run_trace_len(const SaloptRun *run);

// Copies the best-so-far trace into `buf` (at least
// [`salopt_run_trace_len`] slots).
//
// # Safety
//
// `run` must be a live handle; `buf` must point to `len` writable
// doubles.
SaloptStatus salopt_run_trace(const SaloptRun *run, double *buf, size_t len);

// Dimension of the ball hypothesis class over an `dim`-dimensional
// domain: `dim + 1`.
size_t salopt_ball_class_vc_dim(size_t dim);

// Smallest sample size whose zero-training-error bound is at or below
// `target`, written to `out`.
//
// # Safety
//
// `out` must be writable.
SaloptStatus salopt_sample_size_for_error(double target, size_t vc_dim, double eta, uint64_t *out);

// First-hit quantile of uniform search at hit rate `pr` and failure
// level `delta`: the smooth form goes to `ln_form`, the exact
// geometric quantile to `exact`. A zero hit rate yields `ln_form` of
// infinity and `exact` of `UINT64_MAX`.
//
// # Safety
//
// `ln_form` and `exact` must be writable.
SaloptStatus salopt_uniform_first_hit_quantile(double pr,
                                               double delta,
                                               double *ln_form,
                                               uint64_t *exact);

// Query bound of the mixture sampler, written to `out`; infinity when
// both mixture components have hit rate 0.
//
// # Safety
//
// `out` must be writable.
SaloptStatus salopt_mixture_query_bound(double pr_u,
                                        double pr_h_bar,
                                        double lambda,
                                        double delta,
                                        uint64_t m0,
                                        uint64_t m_total,
                                        double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SALOPT_H */
