#ifndef NILSSON_H
#define NILSSON_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum NilssonStatus {
  NILSSON_STATUS_OK = 0,
  NILSSON_STATUS_NULL_POINTER = 1,
  NILSSON_STATUS_INVALID_UTF8 = 2,
  NILSSON_STATUS_SYNTAX = 3,
  NILSSON_STATUS_INVALID_INPUT = 4,
  NILSSON_STATUS_PRECONDITION = 5,
  NILSSON_STATUS_NUMERICAL = 6,
  NILSSON_STATUS_INTERNAL = 7,
  NILSSON_STATUS_PANIC = 8,
} NilssonStatus;

/**
 * Opaque expansion handle.
 */
typedef struct NilssonExpansion NilssonExpansion;

/**
 * Opaque recurrence handle.
 */
typedef struct NilssonRecurrence NilssonRecurrence;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version, a static NUL-terminated string.
 */
const char *nilsson_version(void);

/**
 * Message of the last failed call on this thread; empty if none. Valid until
 * the next failing call on the same thread.
 */
const char *nilsson_last_error_message(void);

/**
 * # Safety
 * `s` must come from this library or be NULL.
 */
void nilsson_string_free(char *s);

/**
 * Parses a recurrence file (JSON text).
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum NilssonStatus nilsson_recurrence_from_json(const char *json, struct NilssonRecurrence **out);

/**
 * Looks up a shipped recurrence: `tet6j`, `apery` or `geometric`.
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum NilssonStatus nilsson_recurrence_builtin(const char *name, struct NilssonRecurrence **out);

/**
 * # Safety
 * `rec` must come from this library or be NULL.
 */
void nilsson_recurrence_free(struct NilssonRecurrence *rec);

/**
 * # Safety
 * `rec` must be a live handle; `out` must be writable.
 */
enum NilssonStatus nilsson_recurrence_order(const struct NilssonRecurrence *rec, size_t *out);

/**
 * Exact values `a_lo..a_hi` as a values-file JSON string.
 *
 * # Safety
 * `rec` must be a live handle; `out` must be writable.
 */
enum NilssonStatus nilsson_recurrence_unroll_json(const struct NilssonRecurrence *rec,
                                                  uint64_t lo,
                                                  uint64_t hi,
                                                  char **out);

/**
 * Formal solutions of the dominant branches at truncation `order`, as an
 * expansion handle with unit Stokes constants.
 *
 * # Safety
 * `rec` must be a live handle; `out` must be writable.
 */
enum NilssonStatus nilsson_recurrence_analyze(const struct NilssonRecurrence *rec,
                                              size_t order,
                                              uint32_t precision,
                                              struct NilssonExpansion **out);

/**
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum NilssonStatus nilsson_expansion_from_json(const char *json, struct NilssonExpansion **out);

/**
 * # Safety
 * `e` must be a live handle; `out` must be writable.
 */
enum NilssonStatus nilsson_expansion_to_json(const struct NilssonExpansion *e, char **out);

/**
 * # Safety
 * `e` must come from this library or be NULL.
 */
void nilsson_expansion_free(struct NilssonExpansion *e);

/**
 * Partial sum up to the cut `(alpha, beta)` at `n`; `alpha` is a rational
 * literal such as `"3/2"`.
 *
 * # Safety
 * `e` must be a live handle, `alpha` a NUL-terminated string and both
 * outputs writable.
 */
enum NilssonStatus nilsson_expansion_partial_sum(const struct NilssonExpansion *e,
                                                 const char *alpha,
                                                 uint32_t beta,
                                                 uint64_t n,
                                                 uint32_t precision,
                                                 double *out_re,
                                                 double *out_im);

/**
 * Values of a balanced multisum for `n = lo..hi`. `term` is a built-in name
 * (`apery-like`, `tet6j`) or a term JSON document.
 *
 * # Safety
 * `term` must be a NUL-terminated string; `out` must be writable.
 */
enum NilssonStatus nilsson_multisum_eval_json(const char *term,
                                              uint64_t lo,
                                              uint64_t hi,
                                              char **out);

/**
 * Exact coefficients `c_0..c_order` of `Γ(n+1-γ)/Γ(n+1) ~ n^{-γ} Σ c_k n^{-k}`
 * as a JSON array of rational strings.
 *
 * # Safety
 * `gamma` must be a NUL-terminated string; `out` must be writable.
 */
enum NilssonStatus nilsson_gamma_series_json(const char *gamma, size_t order, char **out);

/**
 * `I_{γ,β}(n) = ∫_0^∞ z^{γ-1} (log z)^β / (1+z)^{n+1} dz` from its closed form.
 *
 * # Safety
 * `gamma` must be a NUL-terminated string; `out` must be writable.
 */
enum NilssonStatus nilsson_beta_integral(const char *gamma,
                                         uint32_t beta,
                                         uint64_t n,
                                         uint32_t precision,
                                         double *out);

/**
 * `ψ^{(k)}(x)` for rational `x > 0`.
 *
 * # Safety
 * `x` must be a NUL-terminated string; `out` must be writable.
 */
enum NilssonStatus nilsson_polygamma(uint32_t k, const char *x, uint32_t precision, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NILSSON_H */
