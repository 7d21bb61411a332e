#ifndef ENTBELL_H
#define ENTBELL_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum EbStatus {
  EB_STATUS_OK = 0,
  EB_STATUS_NULL_POINTER = 1,
  EB_STATUS_INVALID_ARGUMENT = 2,
  EB_STATUS_EMPTY_POST_SELECTION = 3,
  EB_STATUS_CALIBRATION_FAILED = 4,
  EB_STATUS_ZERO_COUNTS = 5,
  EB_STATUS_FIT_FAILED = 6,
  EB_STATUS_INTERNAL = 7,
} EbStatus;

typedef enum EbNoiseKind {
  /**
   * One visibility for every setting (`visibility_hv`).
   */
  EB_NOISE_KIND_UNIFORM = 0,
  /**
   * `visibility_hv` when `theta2` is a multiple of pi/2, else `visibility_pm`.
   */
  EB_NOISE_KIND_PER_BASIS = 1,
} EbNoiseKind;

/**
 * Opaque handle to a prepared three-photon state.
 */
typedef struct EbPrepared EbPrepared;

typedef struct EbNoise {
  /**
   * An `EbNoiseKind` value.
   */
  int32_t kind;
  double visibility_hv;
  double visibility_pm;
} EbNoise;

typedef struct EbCounts {
  uint64_t n_pp;
  uint64_t n_pm;
  uint64_t n_mp;
  uint64_t n_mm;
} EbCounts;

typedef struct EbEstimate {
  double e_value;
  double sigma;
} EbEstimate;

typedef struct EbChshResult {
  struct EbEstimate e[4];
  double s_value;
  double s_sigma;
  double sigmas_of_violation;
  bool violates_local_bound;
} EbChshResult;

typedef struct EbFringeFit {
  double mean;
  double visibility;
  double phase;
} EbFringeFit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread. Empty if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *eb_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *eb_version(void);

/**
 * Prepares the state with the calibrated wave-plate settings.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum EbStatus eb_prepared_new_calibrated(struct EbPrepared **out);

/**
 * Prepares the state from four quarter-wave plate angles on `(T, a, b1, b2)`
 * and the phase applied to mode `a`.
 *
 * # Safety
 * `qwp_angles` must point to 4 readable doubles; `out` as for
 * [`eb_prepared_new_calibrated`].
 */
enum EbStatus eb_prepared_new(const double *qwp_angles,
                              double calibration_phase,
                              struct EbPrepared **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `p` must be null or a handle from `eb_prepared_new*` not yet freed.
 */
void eb_prepared_free(struct EbPrepared *p);

/**
 * Fidelity of the prepared state with the target state.
 *
 * # Safety
 * `p` must be a live handle; `out` must be writable.
 */
enum EbStatus eb_prepared_fidelity(const struct EbPrepared *p, double *out);

/**
 * Probability that the preparation heralds successfully.
 *
 * # Safety
 * `p` must be a live handle; `out` must be writable.
 */
enum EbStatus eb_prepared_probability(const struct EbPrepared *p, double *out);

/**
 * Outcome probabilities `[++, +-, -+, --]` for Alice's angle `theta1` and
 * Bob's mixing angle `theta2`.
 *
 * # Safety
 * `p` must be a live handle; `out` must point to 4 writable doubles.
 */
enum EbStatus eb_outcome_probabilities(const struct EbPrepared *p,
                                       double theta1,
                                       double theta2,
                                       double *out);

/**
 * Exact correlation `E(theta1, theta2)`.
 *
 * # Safety
 * `p` must be a live handle; `out` must be writable.
 */
enum EbStatus eb_correlation_exact(const struct EbPrepared *p,
                                   double theta1,
                                   double theta2,
                                   double *out);

/**
 * Poisson counts with mean `mean_total * p` per outcome. The same seed and
 * inputs always give the same counts.
 *
 * # Safety
 * `p` must be a live handle; `noise` readable; `out` writable.
 */
enum EbStatus eb_simulate_counts(const struct EbPrepared *p,
                                 double theta1,
                                 double theta2,
                                 const struct EbNoise *noise,
                                 double mean_total,
                                 uint64_t seed,
                                 struct EbCounts *out);

/**
 * Correlation estimate and its propagated Poisson error.
 *
 * # Safety
 * `counts` readable; `out` writable.
 */
enum EbStatus eb_correlation_from_counts(const struct EbCounts *counts, struct EbEstimate *out);

/**
 * CHSH parameter `|-E1 + E2 + E3 + E4|` with its error.
 *
 * # Safety
 * `estimates` must point to 4 readable estimates; `out` writable.
 */
enum EbStatus eb_chsh(const struct EbEstimate *estimates, struct EbChshResult *out);

/**
 * Least-squares fringe fit of `counts[i]` against `angles[i]` (radians).
 *
 * # Safety
 * `angles` and `counts` must each point to `n` readable doubles; `out` writable.
 */
enum EbStatus eb_fit_visibility(const double *angles,
                                const double *counts,
                                size_t n,
                                struct EbFringeFit *out);

/**
 * Largest CHSH value reachable by local deterministic strategies (2).
 */
double eb_lhv_max_chsh(void);

/**
 * White-noise visibility below which the optimal CHSH value stops exceeding 2.
 *
 * # Safety
 * `p` must be a live handle; `out` writable.
 */
enum EbStatus eb_critical_visibility(const struct EbPrepared *p, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ENTBELL_H */
