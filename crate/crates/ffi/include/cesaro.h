#ifndef CESARO_H
#define CESARO_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CesaroStatus {
  CESARO_STATUS_OK = 0,
  CESARO_STATUS_NULL_POINTER = 1,
  CESARO_STATUS_INVALID_INPUT = 2,
  CESARO_STATUS_NUMERICAL = 3,
  CESARO_STATUS_PANIC = 4,
} CesaroStatus;

/**
 * Opaque radial measure.
 */
typedef struct CesaroMeasure CesaroMeasure;

/**
 * Opaque truncated power series.
 */
typedef struct CesaroSeries CesaroSeries;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failed call on this thread; empty after a
 * successful call. Valid until the next call on the same thread.
 */
const char *cesaro_last_error_message(void);

/**
 * Parses a measure file (`{"components": [...]}`).
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum CesaroStatus cesaro_measure_from_json(const char *json, struct CesaroMeasure **out);

/**
 * # Safety
 * `m` must come from [`cesaro_measure_from_json`] and not be freed twice.
 */
void cesaro_measure_free(struct CesaroMeasure *m);

/**
 * # Safety
 * `m` must be a live measure handle and `out` a valid pointer.
 */
enum CesaroStatus cesaro_measure_total_mass(const struct CesaroMeasure *m, double *out);

/**
 * `mu_n`.
 *
 * # Safety
 * `m` must be a live measure handle and `out` a valid pointer.
 */
enum CesaroStatus cesaro_measure_moment(const struct CesaroMeasure *m, size_t n, double *out);

/**
 * `nu([t, 1))`.
 *
 * # Safety
 * `m` must be a live measure handle and `out` a valid pointer.
 */
enum CesaroStatus cesaro_measure_tail(const struct CesaroMeasure *m, double t, double *out);

/**
 * Writes `mu_0..mu_{n_max}` into `buf`, which must hold `len >= n_max + 1` values.
 *
 * # Safety
 * `buf` must be valid for `len` writes.
 */
enum CesaroStatus cesaro_measure_moments(const struct CesaroMeasure *m,
                                         size_t n_max,
                                         double *buf,
                                         size_t len);

/**
 * Series from `len` coefficients; `im` may be null for real coefficients.
 *
 * # Safety
 * `re` (and `im` when non-null) must be valid for `len` reads.
 */
enum CesaroStatus cesaro_series_from_coeffs(const double *re,
                                            const double *im,
                                            size_t len,
                                            struct CesaroSeries **out);

/**
 * Series from a function file; builtins without a degree get `default_degree`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum CesaroStatus cesaro_series_from_json(const char *json,
                                          size_t default_degree,
                                          struct CesaroSeries **out);

/**
 * # Safety
 * `s` must come from a `cesaro_series_*` constructor and not be freed twice.
 */
void cesaro_series_free(struct CesaroSeries *s);

/**
 * # Safety
 * `s` must be a live series handle and `out` a valid pointer.
 */
enum CesaroStatus cesaro_series_degree(const struct CesaroSeries *s, size_t *out);

/**
 * Copies the `degree + 1` coefficients into `re` and `im`, each of length `len`.
 *
 * # Safety
 * `re` and `im` must be valid for `len` writes.
 */
enum CesaroStatus cesaro_series_coeffs(const struct CesaroSeries *s,
                                       double *re,
                                       double *im,
                                       size_t len);

/**
 * Evaluates the series at `z = re + i im`, `|z| <= 1 - 2^-40`.
 *
 * # Safety
 * `s` must be a live series handle; `out_re` and `out_im` valid pointers.
 */
enum CesaroStatus cesaro_series_eval(const struct CesaroSeries *s,
                                     double re,
                                     double im,
                                     double *out_re,
                                     double *out_im);

/**
 * `C_mu f` truncated at the degree of `f`.
 *
 * # Safety
 * `m` and `f` must be live handles and `out` a valid pointer.
 */
enum CesaroStatus cesaro_apply(const struct CesaroMeasure *m,
                               const struct CesaroSeries *f,
                               struct CesaroSeries **out);

/**
 * # Safety
 * `s` must be a live series handle and `out` a valid pointer.
 */
enum CesaroStatus cesaro_bloch_norm(const struct CesaroSeries *s, double *out);

/**
 * # Safety
 * `s` must be a live series handle and `out` a valid pointer.
 */
enum CesaroStatus cesaro_besov_norm(const struct CesaroSeries *s, double p, double *out);

/**
 * # Safety
 * `s` must be a live series handle and `out` a valid pointer.
 */
enum CesaroStatus cesaro_mean_lipschitz_norm(const struct CesaroSeries *s,
                                             double p,
                                             double alpha,
                                             double *out);

/**
 * Classifier verdict for `(s, alpha)` with default probes, as JSON.
 *
 * # Safety
 * `m` must be a live handle; `out` receives a string for [`cesaro_string_free`].
 */
enum CesaroStatus cesaro_classify_json(const struct CesaroMeasure *m,
                                       double s,
                                       double alpha,
                                       char **out);

/**
 * Verification report as JSON; `theorem` is `"boundedness"` or `"compactness"`.
 *
 * # Safety
 * `m` must be a live handle, `theorem` NUL-terminated; `out` receives a
 * string for [`cesaro_string_free`].
 */
enum CesaroStatus cesaro_verify_json(const struct CesaroMeasure *m,
                                     const char *theorem,
                                     double p,
                                     double s,
                                     uint32_t ladder_depth,
                                     char **out);

/**
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void cesaro_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CESARO_H */
