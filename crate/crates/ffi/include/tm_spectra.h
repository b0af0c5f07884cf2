#ifndef TM_SPECTRA_H
#define TM_SPECTRA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TmStatus {
  TM_STATUS_OK = 0,
  TM_STATUS_INVALID_ARGUMENT = 1,
  TM_STATUS_PRECISION_GUARD = 2,
  TM_STATUS_INTERNAL = 3,
  TM_STATUS_NULL_POINTER = 4,
  TM_STATUS_PANIC = 5,
} TmStatus;

/**
 * Opaque parameter handle.
 */
typedef struct TmParameter TmParameter;

typedef struct TmBracket {
  double lo;
  double hi;
} TmBracket;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Exact parameter `p/q` reduced modulo one.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum TmStatus tm_parameter_from_ratio(int64_t p, uint64_t q, struct TmParameter **out);

/**
 * Floating-point parameter reduced modulo one.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum TmStatus tm_parameter_from_real(double c, struct TmParameter **out);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `param` must come from a constructor above and not be freed twice.
 */
void tm_parameter_free(struct TmParameter *param);

/**
 * Dominant eigenvalue of the correlation matrix.
 *
 * # Safety
 * `param` must be a live handle and `out` valid for writes.
 */
enum TmStatus tm_lambda1(const struct TmParameter *param, struct TmBracket *out);

/**
 * `D_2 = log_2 lambda_1`.
 *
 * # Safety
 * `param` must be a live handle and `out` valid for writes.
 */
enum TmStatus tm_correlation_exponent(const struct TmParameter *param, struct TmBracket *out);

/**
 * Partition pressure at temperature `t`, depth `n`, grid depth `grid_depth`.
 *
 * # Safety
 * `param` must be a live handle and `out` valid for writes.
 */
enum TmStatus tm_partition_pressure(const struct TmParameter *param,
                                    double t,
                                    uint32_t n,
                                    uint32_t grid_depth,
                                    struct TmBracket *out);

/**
 * Partition pressure over words avoiding the forbidden `(m+1)`-words.
 *
 * # Safety
 * `param` must be a live handle and `out` valid for writes.
 */
enum TmStatus tm_restricted_pressure(const struct TmParameter *param,
                                     double t,
                                     uint32_t n,
                                     uint32_t m,
                                     struct TmBracket *out);

/**
 * `max((1 - 2t) log 2, 0)`, the pressure at `c = 0`.
 */
double tm_pressure_c0(double t);

/**
 * Writes `eta_0, ..., eta_{len-1}` into `re` and `im`.
 *
 * # Safety
 * `param` must be a live handle; `re` and `im` must each hold `len` doubles.
 */
enum TmStatus tm_eta(const struct TmParameter *param, size_t len, double *re, double *im);

/**
 * Mass of the cylinder spelled by `len` bits (each 0 or 1), computed with
 * `buffer` extra orders of the partial product.
 *
 * # Safety
 * `param` must be a live handle, `bits` must hold `len` bytes (or be null
 * when `len` is 0) and `out` must be valid for writes.
 */
enum TmStatus tm_cylinder_measure(const struct TmParameter *param,
                                  const uint8_t *bits,
                                  size_t len,
                                  uint32_t buffer,
                                  struct TmBracket *out);

/**
 * Message of the last failure on this thread, empty if none. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *tm_last_error_message(void);

/**
 * Library version, a static NUL-terminated string.
 */
const char *tm_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TM_SPECTRA_H */
