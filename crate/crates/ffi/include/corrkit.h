/* corrkit C API. Generated by cbindgen; do not edit. */

#ifndef CORRKIT_H
#define CORRKIT_H

#pragma once

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code of every fallible call.
 */
typedef enum CorrkitStatus {
  CORRKIT_STATUS_OK = 0,
  CORRKIT_STATUS_NULL_POINTER = 1,
  CORRKIT_STATUS_INVALID_ARGUMENT = 2,
  CORRKIT_STATUS_DIMENSION_MISMATCH = 3,
  CORRKIT_STATUS_CAPACITY_EXCEEDED = 4,
  CORRKIT_STATUS_NO_CONVERGENCE = 5,
  CORRKIT_STATUS_INTERNAL_ERROR = 6,
} CorrkitStatus;

/**
 * Verdict of a definiteness check.
 */
typedef enum CorrkitVerdict {
  CORRKIT_VERDICT_POSITIVE = 0,
  CORRKIT_VERDICT_NOT_POSITIVE = 1,
  CORRKIT_VERDICT_UNKNOWN = 2,
} CorrkitVerdict;

/**
 * Opaque definiteness-verdict handle.
 */
typedef struct CorrkitDefiniteness CorrkitDefiniteness;

/**
 * Opaque symmetric matrix handle.
 */
typedef struct CorrkitMatrix CorrkitMatrix;

/**
 * Opaque membership-verdict handle.
 */
typedef struct CorrkitMembership CorrkitMembership;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread. Valid until the next
 * failing call on the same thread; never null.
 */
const char *corrkit_last_error(void);

/**
 * Crate version as a static string.
 */
const char *corrkit_version(void);

/**
 * Frees a string returned by a `_to_json` call.
 */
void corrkit_string_free(char *s);

/**
 * Builds an n×n symmetric matrix from a row-major buffer. Asymmetric input
 * is replaced by its symmetric part (the quadratic form is unchanged).
 *
 * # Safety
 * `data` must point to `n*n` readable doubles; `out` must be writable.
 */
enum CorrkitStatus corrkit_matrix_new(size_t n, const double *data, struct CorrkitMatrix **out);

/**
 * # Safety
 * `m` must be a pointer from `corrkit_matrix_new` (or null).
 */
void corrkit_matrix_free(struct CorrkitMatrix *m);

/**
 * Matrix order, or 0 for null.
 *
 * # Safety
 * `m` must be a valid handle or null.
 */
size_t corrkit_matrix_order(const struct CorrkitMatrix *m);

/**
 * Exact corner-positivity verdict by hypercube enumeration.
 *
 * # Safety
 * `m` must be a valid matrix handle; `out` must be writable.
 */
enum CorrkitStatus corrkit_cpd_exact(const struct CorrkitMatrix *m,
                                     struct CorrkitDefiniteness **out);

/**
 * Corner-positivity via the anti-stable-state criterion.
 *
 * # Safety
 * `m` must be a valid matrix handle; `out` must be writable.
 */
enum CorrkitStatus corrkit_cpd_anti_stable(const struct CorrkitMatrix *m,
                                           struct CorrkitDefiniteness **out);

/**
 * Heuristic refutation by seeded multi-start descent; never "positive".
 *
 * # Safety
 * `m` must be a valid matrix handle; `out` must be writable.
 */
enum CorrkitStatus corrkit_cpd_refute(const struct CorrkitMatrix *m,
                                      size_t starts,
                                      uint64_t seed,
                                      struct CorrkitDefiniteness **out);

/**
 * Exact positivity over the bounded symmetric lattice {±1,…,±M}^n.
 *
 * # Safety
 * `m` must be a valid matrix handle; `out` must be writable.
 */
enum CorrkitStatus corrkit_lattice_positive_exact(const struct CorrkitMatrix *m,
                                                  uint32_t m_bound,
                                                  struct CorrkitDefiniteness **out);

/**
 * # Safety
 * `d` must be a valid handle or null.
 */
void corrkit_definiteness_free(struct CorrkitDefiniteness *d);

/**
 * Verdict of the check; `Unknown` for a null handle.
 *
 * # Safety
 * `d` must be a valid handle or null.
 */
enum CorrkitVerdict corrkit_definiteness_verdict(const struct CorrkitDefiniteness *d);

/**
 * Exact minimum of the form over the set, when the method was exact.
 *
 * # Safety
 * `d` must be a valid handle; `margin` must be writable.
 */
enum CorrkitStatus corrkit_definiteness_margin(const struct CorrkitDefiniteness *d, double *margin);

/**
 * Length of the violating witness, or 0 when there is none.
 *
 * # Safety
 * `d` must be a valid handle or null.
 */
size_t corrkit_definiteness_witness_len(const struct CorrkitDefiniteness *d);

/**
 * Copies the witness into `buf` (capacity `cap` int32 values).
 *
 * # Safety
 * `d` must be a valid handle; `buf` must have room for `cap` values.
 */
enum CorrkitStatus corrkit_definiteness_witness(const struct CorrkitDefiniteness *d,
                                                int32_t *buf,
                                                size_t cap);

/**
 * Serializes the verdict as JSON; free with `corrkit_string_free`.
 *
 * # Safety
 * `d` must be a valid handle; `out` must be writable.
 */
enum CorrkitStatus corrkit_definiteness_to_json(const struct CorrkitDefiniteness *d, char **out);

/**
 * Membership of a ±1-class lag sequence (rho[0] must be 1).
 *
 * # Safety
 * `rho` must point to `len` readable doubles; `out` must be writable.
 */
enum CorrkitStatus corrkit_acf_unit_test(const double *rho,
                                         size_t len,
                                         uint64_t seed,
                                         struct CorrkitMembership **out);

/**
 * Membership of a lattice-class lag sequence
 * (rho[0] must equal (M+1)(2M+1)/6).
 *
 * # Safety
 * `rho` must point to `len` readable doubles; `out` must be writable.
 */
enum CorrkitStatus corrkit_acf_lattice_test(const double *rho,
                                            size_t len,
                                            uint32_t m_bound,
                                            uint64_t seed,
                                            struct CorrkitMembership **out);

/**
 * # Safety
 * `h` must be a valid handle or null.
 */
void corrkit_membership_free(struct CorrkitMembership *h);

/**
 * 1 for a member, 0 for a non-member, −1 for a null handle.
 *
 * # Safety
 * `h` must be a valid handle or null.
 */
int32_t corrkit_membership_is_member(const struct CorrkitMembership *h);

/**
 * Decomposition residual (members) or witness trace value (non-members).
 *
 * # Safety
 * `h` must be a valid handle; `value` must be writable.
 */
enum CorrkitStatus corrkit_membership_certificate_value(const struct CorrkitMembership *h,
                                                        double *value);

/**
 * Serializes the verdict (decomposition or witness included) as JSON.
 *
 * # Safety
 * `h` must be a valid handle; `out` must be writable.
 */
enum CorrkitStatus corrkit_membership_to_json(const struct CorrkitMembership *h, char **out);

/**
 * Simulates the ±1 flip chain into a caller buffer of `len` int32 values.
 *
 * # Safety
 * `out` must have room for `len` values.
 */
enum CorrkitStatus corrkit_telegraph_simulate(double p_flip,
                                              size_t len,
                                              uint64_t seed,
                                              int32_t *out);

/**
 * Writes rho[0..=max_lag] (per-lag denominators) into `rho_out`.
 *
 * # Safety
 * `x` must point to `len` doubles; `rho_out` must hold `max_lag + 1`.
 */
enum CorrkitStatus corrkit_acf_estimate(const double *x,
                                        size_t len,
                                        size_t max_lag,
                                        double *rho_out);

/**
 * Transient distribution of the jump process with generator `q` (row-major
 * n×n) at time `t`, written into `out` (n doubles).
 *
 * # Safety
 * `q` must point to `n*n` doubles; `out` must hold `n`.
 */
enum CorrkitStatus corrkit_transient_distribution(const double *q,
                                                  size_t n,
                                                  size_t init_state,
                                                  double t,
                                                  double tol,
                                                  double *out);

/**
 * Uniformization p = I + q/lambda. Pass `lambda ≤ 0` for the default (max
 * exit rate). Writes the jump matrix into `p_out` (n×n) and the rate used
 * into `lambda_out`.
 *
 * # Safety
 * `q` must point to `n*n` doubles; `p_out` must hold `n*n`; `lambda_out`
 * must be writable.
 */
enum CorrkitStatus corrkit_uniformize(const double *q,
                                      size_t n,
                                      double lambda,
                                      double *p_out,
                                      double *lambda_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CORRKIT_H */
