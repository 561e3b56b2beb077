#ifndef EPROC_H
#define EPROC_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes shared by every entry point.
 */
typedef enum EprocStatus {
  EPROC_STATUS_OK = 0,
  EPROC_STATUS_NULL_POINTER = 1,
  /**
   * Bad configuration, dimensions, probabilities or arguments.
   */
  EPROC_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The saddle solver could not certify its tolerance.
   */
  EPROC_STATUS_SOLVER_FAILURE = 3,
  EPROC_STATUS_NOT_APPLICABLE = 4,
  /**
   * An observation was rejected by the process.
   */
  EPROC_STATUS_INVALID_OBSERVATION = 5,
  /**
   * A Rust panic was caught at the boundary.
   */
  EPROC_STATUS_INTERNAL = 6,
} EprocStatus;

/**
 * Opaque wealth process.
 */
typedef struct EprocProcess EprocProcess;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null after a
 * successful call. The pointer stays valid until the next call.
 */
const char *eproc_last_error_message(void);

/**
 * Builds a process from a JSON experiment config. `stream_index` selects
 * the random stream used by processes with internal randomness.
 *
 * # Safety
 * `config_json` must be a NUL-terminated string and `out` valid for writes.
 */
enum EprocStatus eproc_process_new(const char *config_json,
                                   uint64_t stream_index,
                                   struct EprocProcess **out);

/**
 * Releases a process. Null is ignored.
 *
 * # Safety
 * `process` must come from [`eproc_process_new`] and not be used again.
 */
void eproc_process_free(struct EprocProcess *process);

/**
 * Feeds one categorical symbol. `log_wealth` may be null.
 *
 * # Safety
 * `process` must be a live handle; `log_wealth` null or valid for writes.
 */
enum EprocStatus eproc_process_step_symbol(struct EprocProcess *process,
                                           size_t symbol,
                                           double *log_wealth);

/**
 * Feeds one observation in `[0, 1]`. `log_wealth` may be null.
 *
 * # Safety
 * `process` must be a live handle; `log_wealth` null or valid for writes.
 */
enum EprocStatus eproc_process_step_real(struct EprocProcess *process,
                                         double x,
                                         double *log_wealth);

/**
 * Current `log W_n`; may be `+inf`.
 *
 * # Safety
 * `process` must be a live handle and `out` valid for writes.
 */
enum EprocStatus eproc_process_log_wealth(const struct EprocProcess *process, double *out);

/**
 * Number of observations consumed.
 *
 * # Safety
 * `process` must be a live handle and `out` valid for writes.
 */
enum EprocStatus eproc_process_steps(const struct EprocProcess *process, uint64_t *out);

/**
 * `KL(p || q)` in nats for two pmfs of length `m`.
 *
 * # Safety
 * `p` and `q` must point to `m` doubles and `out` be valid for writes.
 */
enum EprocStatus eproc_kl_divergence(const double *p, const double *q, size_t m, double *out);

/**
 * `KL_inf` of `p` against the convex hull of `k` vertices, each a pmf of
 * length `m`, stored row-major in `vertices`. `+inf` when no hull point
 * dominates `p`.
 *
 * # Safety
 * `vertices` must hold `k * m` doubles, `p` hold `m`, `out` be writable.
 */
enum EprocStatus eproc_kl_inf_hull(const double *vertices,
                                   size_t k,
                                   size_t m,
                                   const double *p,
                                   double *out);

/**
 * `KL_inf` of a discrete distribution on `[0, 1]` against the null
 * `{mean = mu0}`.
 *
 * # Safety
 * `atoms` and `weights` must hold `len` doubles and `out` be writable.
 */
enum EprocStatus eproc_kl_inf_bounded_mean(const double *atoms,
                                           const double *weights,
                                           size_t len,
                                           double mu0,
                                           double *out);

/**
 * Lower bound `log(1/alpha) / gamma_star` on the expected stopping time.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum EprocStatus eproc_lower_bound(double alpha, double gamma_star, double *out);

/**
 * Largest root of `y = k + l log y`. Returns `NotApplicable` when the
 * closed-form upper bound does not apply.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum EprocStatus eproc_solve_largest_root(double k, double l, double tol, double *out);

/**
 * First 1-based index where `log_wealth` reaches `log(1/alpha)`, or `0`
 * when the path never crosses.
 *
 * # Safety
 * `log_wealth` must hold `len` doubles and `out` be writable.
 */
enum EprocStatus eproc_first_crossing(const double *log_wealth,
                                      size_t len,
                                      double alpha,
                                      size_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EPROC_H */
