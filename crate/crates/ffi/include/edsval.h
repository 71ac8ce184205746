#ifndef EDSVAL_H
#define EDSVAL_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Outcome of a call. The first four values match the CLI exit codes.
 */
typedef enum EdsvStatus {
  EDSV_STATUS_OK = 0,
  /**
   * A closed form disagreed with direct computation.
   */
  EDSV_STATUS_MISMATCH = 1,
  EDSV_STATUS_INVALID_INPUT = 2,
  /**
   * Precision, size or convergence limit reached.
   */
  EDSV_STATUS_RESOURCE = 3,
  EDSV_STATUS_NULL_POINTER = 4,
  /**
   * A Rust panic was caught at the boundary.
   */
  EDSV_STATUS_PANIC = 5,
} EdsvStatus;

/**
 * A curve with an optional point.
 */
typedef struct EdsvCurve EdsvCurve;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parse `{"a": [a1, a2, a3, a4, a6], "P": [x, y]}` into a new handle.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum EdsvStatus edsv_curve_from_json(const char *json, struct EdsvCurve **out);

/**
 * Release a handle. Null is ignored.
 *
 * # Safety
 * `curve` must come from `edsv_curve_from_json` and not be freed twice.
 */
void edsv_curve_free(struct EdsvCurve *curve);

/**
 * Terms `W_1..W_n` as decimal strings, plus `v_p(W_k)` when `p > 0`:
 * `{"terms": [...], "valuations": [...] | null}` (infinite valuations are null).
 *
 * # Safety
 * `curve` must be a live handle; `out` must be writable.
 */
enum EdsvStatus edsv_eds(const struct EdsvCurve *curve, uint32_t n, uint64_t p, char **out);

/**
 * Derive the closed form at `p` and compare it with `v_p(W_k)`, `k ≤ n`.
 * Writes the full report; returns `Mismatch` if any term disagrees.
 *
 * # Safety
 * `curve` must be a live handle; `out` must be writable.
 */
enum EdsvStatus edsv_verify(const struct EdsvCurve *curve, uint64_t p, uint32_t n, char **out);

/**
 * Canonical height of the curve's point by repeated doubling.
 *
 * # Safety
 * `curve` must be a live handle; `out` must be writable.
 */
enum EdsvStatus edsv_canonical_height(const struct EdsvCurve *curve,
                                      double tolerance,
                                      uint32_t depth,
                                      double *out);

/**
 * `R_n(a, l)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum EdsvStatus edsv_troublemaker(int64_t n, int64_t a, int64_t ell, int64_t *out);

/**
 * Message for the last failed call on this thread, or null. Valid until
 * the next call into the library from the same thread.
 */
const char *edsv_last_error(void);

/**
 * Release a string returned by the library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void edsv_string_free(char *s);

/**
 * Library version, static storage.
 */
const char *edsv_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EDSVAL_H */
