#ifndef FATPOINT_H
#define FATPOINT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FpEngine {
  FP_ENGINE_BLOCK = 0,
  FP_ENGINE_NAIVE = 1,
  /**
   * Run both and fail with `FP_STATUS_VERIFICATION_FAILED` on disagreement.
   */
  FP_ENGINE_BOTH = 2,
} FpEngine;

typedef enum FpStatus {
  FP_STATUS_OK = 0,
  FP_STATUS_NULL_POINTER = 1,
  /**
   * Arguments outside the domain of the operation.
   */
  FP_STATUS_INVALID_ARGUMENT = 2,
  /**
   * A computed result failed an internal cross-check.
   */
  FP_STATUS_VERIFICATION_FAILED = 3,
  /**
   * A Rust panic was caught at the boundary.
   */
  FP_STATUS_INTERNAL = 4,
} FpStatus;

/**
 * Opaque bound report for one `(m, n)`.
 */
typedef struct FpBoundReport FpBoundReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *fp_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed already.
 */
void fp_string_free(char *s);

/**
 * Library version as a static string.
 */
const char *fp_version(void);

/**
 * `lambda_n` as `"p/q"` (or `"p"` when integral).
 *
 * # Safety
 * `out` must be a valid pointer to write a string pointer into.
 */
enum FpStatus fp_lambda(uint64_t n, char **out);

/**
 * `ceil(m lambda_n)`.
 *
 * # Safety
 * `out` must be a valid pointer to a `uint64_t`.
 */
enum FpStatus fp_lambda_bound(uint64_t m, uint64_t n, uint64_t *out);

/**
 * `R(m, n)` from the unloading algorithm. `engine` is an [`FpEngine`]
 * value; anything else is rejected as an invalid argument.
 *
 * # Safety
 * `out` must be a valid pointer to a `uint64_t`.
 */
enum FpStatus fp_roe_R(uint64_t m, uint64_t n, uint32_t engine, uint64_t *out);

/**
 * The averaged constant `r(n)` as `"p/q"`.
 *
 * # Safety
 * `out` must be a valid pointer to write a string pointer into.
 */
enum FpStatus fp_roe_r(uint64_t n, char **out);

/**
 * Computes every bound for `(m, n)`. Release with [`fp_bound_report_free`].
 *
 * # Safety
 * `out` must be a valid pointer to write a handle into.
 */
enum FpStatus fp_bound_report_new(uint64_t m, uint64_t n, struct FpBoundReport **out);

/**
 * # Safety
 * `report` must be null or a handle from [`fp_bound_report_new`] not yet freed.
 */
void fp_bound_report_free(struct FpBoundReport *report);

/**
 * The largest lower bound in the report.
 *
 * # Safety
 * `report` must be a live handle and `out` a valid pointer.
 */
enum FpStatus fp_bound_report_best(const struct FpBoundReport *report, uint64_t *out);

/**
 * Name of the bound that produced the best value, e.g. `"lambda"`.
 *
 * # Safety
 * `report` must be a live handle and `out` a valid pointer.
 */
enum FpStatus fp_bound_report_best_source(const struct FpBoundReport *report, char **out);

/**
 * `ceil(m lambda_n)` as recorded in the report.
 *
 * # Safety
 * `report` must be a live handle and `out` a valid pointer.
 */
enum FpStatus fp_bound_report_lambda_bound(const struct FpBoundReport *report, uint64_t *out);

/**
 * `R(m, n)`; `*present` is set to false when `n < 3`.
 *
 * # Safety
 * `report` must be a live handle; `out` and `present` valid pointers.
 */
enum FpStatus fp_bound_report_roe_R(const struct FpBoundReport *report,
                                    uint64_t *out,
                                    bool *present);

/**
 * The exact value `d(m, n)` for `n <= 9`; `*present` is false otherwise.
 *
 * # Safety
 * `report` must be a live handle; `out` and `present` valid pointers.
 */
enum FpStatus fp_bound_report_exact(const struct FpBoundReport *report,
                                    uint64_t *out,
                                    bool *present);

/**
 * The whole report as JSON with a top-level `"schema": 1`.
 *
 * # Safety
 * `report` must be a live handle and `out` a valid pointer.
 */
enum FpStatus fp_bound_report_to_json(const struct FpBoundReport *report, char **out);

/**
 * The nef certificate behind `lambda_n` as JSON with `"schema": 1`.
 *
 * # Safety
 * `out` must be a valid pointer to write a string pointer into.
 */
enum FpStatus fp_lambda_certificate_json(uint64_t n, char **out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* FATPOINT_H */
