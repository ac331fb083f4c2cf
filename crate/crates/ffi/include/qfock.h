#ifndef QFOCK_H
#define QFOCK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QfFamily {
  QF_FAMILY_SQUEEZED = 0,
  QF_FAMILY_THERMAL = 1,
} QfFamily;

typedef enum QfFormat {
  QF_FORMAT_CSV = 0,
  QF_FORMAT_JSON = 1,
} QfFormat;

typedef enum QfStatus {
  QF_STATUS_OK = 0,
  QF_STATUS_NULL_POINTER = 1,
  QF_STATUS_INVALID_ARGUMENT = 2,
  QF_STATUS_PARSE_ERROR = 3,
  QF_STATUS_DIVERGENT = 4,
  QF_STATUS_PRECONDITION = 5,
  QF_STATUS_NUMERIC = 6,
  QF_STATUS_BUFFER_TOO_SMALL = 7,
  QF_STATUS_PANIC = 8,
} QfStatus;

/**
 * Opaque truncated operator handle.
 */
typedef struct QfOperator QfOperator;

/**
 * Opaque deformation scheme handle.
 */
typedef struct QfScheme QfScheme;

typedef struct QfMoments {
  double adag_a;
  double a_adag;
  double a_atilde;
  double adag_atildedag;
} QfMoments;

typedef struct QfQuadratures {
  double var1;
  double var2;
  double product;
} QfQuadratures;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length excluding the NUL,
 * or 0 when there is no error.
 *
 * # Safety
 * `buf` must be NULL or point to `len` writable bytes.
 */
size_t qf_last_error_message(char *buf, size_t len);

/**
 * Creates a scheme from `undeformed`, `bm` or `expr:<text>`.
 *
 * # Safety
 * `descriptor` must be a NUL-terminated string; `out` must be writable.
 */
enum QfStatus qf_scheme_new(const char *descriptor, double q, struct QfScheme **out);

/**
 * # Safety
 * `scheme` must be NULL or a handle from [`qf_scheme_new`] not yet freed.
 */
void qf_scheme_free(struct QfScheme *scheme);

/**
 * `D_q(n)`.
 *
 * # Safety
 * `scheme` must be a live handle; `out` must be writable.
 */
enum QfStatus qf_scheme_eval_d(const struct QfScheme *scheme, uint32_t n, double *out);

/**
 * `D_q(n)!`.
 *
 * # Safety
 * `scheme` must be a live handle; `out` must be writable.
 */
enum QfStatus qf_scheme_d_factorial(const struct QfScheme *scheme, uint32_t n, double *out);

/**
 * Builds `annihilation`, `creation`, `number` or `identity` of size `dim`.
 *
 * # Safety
 * `scheme` must be a live handle, `name` NUL-terminated, `out` writable.
 */
enum QfStatus qf_operator_new(const struct QfScheme *scheme,
                              const char *name,
                              size_t dim,
                              struct QfOperator **out);

/**
 * # Safety
 * `op` must be NULL or a handle from [`qf_operator_new`] not yet freed.
 */
void qf_operator_free(struct QfOperator *op);

/**
 * Matrix dimension, or 0 for NULL.
 *
 * # Safety
 * `op` must be NULL or a live handle.
 */
size_t qf_operator_dim(const struct QfOperator *op);

/**
 * Copies the `dim * dim` entries in row-major order.
 *
 * # Safety
 * `op` must be a live handle and `buf` must point to `len` writable doubles.
 */
enum QfStatus qf_operator_copy_entries(const struct QfOperator *op, double *buf, size_t len);

/**
 * Runs the algebra check; writes whether every relation passed and the
 * largest scaled residual.
 *
 * # Safety
 * `scheme` must be a live handle; output pointers writable.
 */
enum QfStatus qf_verify_algebra(const struct QfScheme *scheme,
                                size_t dim,
                                double tol,
                                bool *out_passed,
                                double *out_max_residual);

/**
 * Second moments of the squeezed vacuum by truncated series.
 *
 * # Safety
 * `scheme` must be a live handle; `out` writable.
 */
enum QfStatus qf_squeezed_moments(const struct QfScheme *scheme,
                                  double xi,
                                  double tail_tol,
                                  struct QfMoments *out);

/**
 * Second moments of the thermal vacuum by truncated series.
 *
 * # Safety
 * `scheme` must be a live handle; `out` writable.
 */
enum QfStatus qf_thermal_moments(const struct QfScheme *scheme,
                                 double theta,
                                 double tail_tol,
                                 struct QfMoments *out);

/**
 * # Safety
 * `moments` must be readable, `out` writable.
 */
enum QfStatus qf_quadrature_variances(const struct QfMoments *moments, struct QfQuadratures *out);

/**
 * Biedenharn-Macfarlane squeezed mean photon number in closed form.
 *
 * # Safety
 * `out` must be writable.
 */
enum QfStatus qf_squeezed_nbar_closed_bm(double q, double xi, double *out);

/**
 * Biedenharn-Macfarlane thermal mean occupation in closed form.
 *
 * # Safety
 * `out` must be writable.
 */
enum QfStatus qf_thermal_nbar_closed_bm(double q, double theta, double *out);

/**
 * Squeezed-vacuum entanglement entropy in bits.
 */
double qf_squeezed_entropy_bits(double xi);

/**
 * Thermal-vacuum entanglement entropy in bits.
 *
 * # Safety
 * `out` must be writable.
 */
enum QfStatus qf_thermal_entropy_bits(double theta, double *out);

/**
 * Runs a sweep and returns the rendered table as a new string, to be
 * released with [`qf_string_free`].
 *
 * # Safety
 * `scheme` must be NUL-terminated; `q_values`/`params` must point to
 * `n_q`/`n_params` doubles; `out` must be writable.
 */
enum QfStatus qf_sweep(enum QfFamily family,
                       const char *scheme,
                       const double *q_values,
                       size_t n_q,
                       const double *params,
                       size_t n_params,
                       double tail_tol,
                       enum QfFormat format,
                       char **out);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library and not yet freed.
 */
void qf_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QFOCK_H */
