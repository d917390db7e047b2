#ifndef MAXRAND_H
#define MAXRAND_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum MaxrandStatus {
  MAXRAND_STATUS_OK = 0,
  MAXRAND_STATUS_NULL_POINTER = 1,
  MAXRAND_STATUS_INVALID_INPUT = 2,
  MAXRAND_STATUS_DIMENSION_MISMATCH = 3,
  MAXRAND_STATUS_NO_CONVERGENCE = 4,
  MAXRAND_STATUS_PANIC = 5,
} MaxrandStatus;

/**
 * A rank-one projective measurement.
 */
typedef struct MaxrandBasis MaxrandBasis;

/**
 * A validated density matrix.
 */
typedef struct MaxrandState MaxrandState;

typedef struct MaxrandOptimal {
  double h_min_star;
  double h_star;
  double h_max_star;
  double p_guess_star;
} MaxrandOptimal;

typedef struct MaxrandGuessing {
  /**
   * Best achieved guessing probability.
   */
  double value;
  /**
   * Certified upper bound.
   */
  double upper;
  /**
   * 1 when `upper - value` is within the bracket tolerance.
   */
  int32_t exact;
} MaxrandGuessing;

typedef struct MaxrandVerdict {
  /**
   * 1 when the certified min-entropy covers the claim.
   */
  int32_t accepted;
  double certified_hmin;
  double upper;
} MaxrandVerdict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Description of the last failure on this thread, or null. Valid until the next failing call.
 */
const char *maxrand_last_error(void);

/**
 * Validates a `dim x dim` density matrix. `im` may be null for a real matrix.
 *
 * # Safety
 * `re` (and `im` when non-null) must point to `dim * dim` doubles; `state_out` must be writable.
 */
enum MaxrandStatus maxrand_state_new(size_t dim,
                                     const double *re,
                                     const double *im,
                                     double psd_tol,
                                     struct MaxrandState **state_out);

/**
 * # Safety
 * `state` must come from [`maxrand_state_new`] and not be used afterwards. Null is ignored.
 */
void maxrand_state_free(struct MaxrandState *state);

/**
 * Dimension of the state, 0 for null.
 *
 * # Safety
 * `state` must be null or a live handle.
 */
size_t maxrand_state_dim(const struct MaxrandState *state);

/**
 * Builds a basis from `dim` vectors stored one after another (`re[i * dim + j]` is component
 * `j` of vector `i`). `im` may be null.
 *
 * # Safety
 * `re` (and `im` when non-null) must point to `dim * dim` doubles; `basis_out` must be writable.
 */
enum MaxrandStatus maxrand_basis_new(size_t dim,
                                     const double *re,
                                     const double *im,
                                     double basis_tol,
                                     struct MaxrandBasis **basis_out);

/**
 * Basis unbiased to the eigenbasis of `state`.
 *
 * # Safety
 * `state` must be a live handle; `basis_out` must be writable.
 */
enum MaxrandStatus maxrand_basis_unbiased(const struct MaxrandState *state,
                                          struct MaxrandBasis **basis_out);

/**
 * Copies the basis vectors into `re` and `im`, laid out as in [`maxrand_basis_new`].
 *
 * # Safety
 * `basis` must be a live handle; `re` and `im` must each have room for `dim * dim` doubles.
 */
enum MaxrandStatus maxrand_basis_vectors(const struct MaxrandBasis *basis, double *re, double *im);

/**
 * # Safety
 * `basis` must come from a `maxrand_basis_*` constructor and not be used afterwards.
 */
void maxrand_basis_free(struct MaxrandBasis *basis);

/**
 * Optimal min-, von Neumann and max-entropy over all rank-one measurements.
 *
 * # Safety
 * `state` must be a live handle; `result` must be writable.
 */
enum MaxrandStatus maxrand_optimal(const struct MaxrandState *state, struct MaxrandOptimal *result);

/**
 * Guessing probability of `basis` on `state` with its certified upper bound.
 *
 * # Safety
 * `state` and `basis` must be live handles; `result` must be writable.
 */
enum MaxrandStatus maxrand_pguess(const struct MaxrandState *state,
                                  const struct MaxrandBasis *basis,
                                  uint64_t seed,
                                  size_t restarts,
                                  struct MaxrandGuessing *result);

/**
 * Conditional von Neumann entropy of the outcomes of `basis`.
 *
 * # Safety
 * `state` and `basis` must be live handles; `result` must be writable.
 */
enum MaxrandStatus maxrand_conditional_h(const struct MaxrandState *state,
                                         const struct MaxrandBasis *basis,
                                         double *result);

/**
 * Conditional max-entropy of the outcomes of `basis`.
 *
 * # Safety
 * `state` and `basis` must be live handles; `result` must be writable.
 */
enum MaxrandStatus maxrand_conditional_hmax(const struct MaxrandState *state,
                                            const struct MaxrandBasis *basis,
                                            double *result);

/**
 * Checks a claimed conditional min-entropy against a dual certificate.
 *
 * # Safety
 * `state` and `basis` must be live handles; `result` must be writable.
 */
enum MaxrandStatus maxrand_certify(const struct MaxrandState *state,
                                   const struct MaxrandBasis *basis,
                                   double claimed_hmin,
                                   double tol,
                                   struct MaxrandVerdict *result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MAXRAND_H */
