#ifndef DESAL_H
#define DESAL_H

/* Generated by cbindgen from desal-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result codes for every fallible entry point.
 */
typedef enum DesalStatus {
  DESAL_STATUS_OK = 0,
  /*
   A required pointer argument was NULL.
   */
  DESAL_STATUS_NULL_POINTER = 1,
  /*
   A string argument was not valid UTF-8.
   */
  DESAL_STATUS_INVALID_UTF8 = 2,
  /*
   The JSON document could not be parsed.
   */
  DESAL_STATUS_PARSE_ERROR = 3,
  /*
   The configuration violates a model invariant.
   */
  DESAL_STATUS_INVALID_CONFIG = 4,
  /*
   A numeric argument was out of range.
   */
  DESAL_STATUS_INVALID_ARGUMENT = 5,
  /*
   Internal failure (should not happen on validated inputs).
   */
  DESAL_STATUS_INTERNAL = 6,
} DesalStatus;

/*
 Operating zone of a dispatched point.
 */
typedef enum DesalZone {
  DESAL_ZONE_IMPORT = 0,
  DESAL_ZONE_NZ_LOWER = 1,
  DESAL_ZONE_NZ_INTERIOR = 2,
  DESAL_ZONE_NZ_UPPER = 3,
  DESAL_ZONE_EXPORT = 4,
} DesalZone;

/*
 Opaque: a validated plant configuration plus tariff.
 */
typedef struct DesalCase DesalCase;

/*
 Opaque: a precomputed policy threshold set.
 */
typedef struct DesalThresholds DesalThresholds;

/*
 A dispatched operating point plus its profit and zone.
 */
typedef struct DesalDispatch {
  /*
   TDP water output (m³/h).
   */
  double w_h;
  /*
   RODP water output (m³/h).
   */
  double w_r;
  /*
   TDP electricity output (kWh).
   */
  double q_h;
  /*
   RODP electricity consumption (kWh).
   */
  double q_r;
  /*
   TDP fuel input (BTU).
   */
  double p_h;
  /*
   Renewable generation (kWh).
   */
  double g;
  /*
   Net grid consumption (kWh); positive imports, negative exports.
   */
  double z;
  /*
   Plant profit at the point ($).
   */
  double profit;
  enum DesalZone zone;
} DesalDispatch;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the most recent failure on this thread. The pointer stays
 valid until the next library call on the same thread; never free it.
 */
const char *desal_last_error(void);

/*
 Library version as a static NUL-terminated string; never free it.
 */
const char *desal_version(void);

/*
 Parse and validate a configuration document (`{"plant": ..., "tariff": ...}`).
 On success writes a new handle to `out_case`.

 # Safety
 `json` must point to a NUL-terminated string and `out_case` to writable
 memory; both must stay valid for the duration of the call.
 */
enum DesalStatus desal_case_from_json(const char *json, struct DesalCase **out_case);

/*
 Release a case handle. NULL is a no-op.

 # Safety
 `case` must be a pointer previously returned by [`desal_case_from_json`]
 and not yet freed.
 */
void desal_case_free(struct DesalCase *case_);

/*
 Override the water selling price on an existing case; the combined
 configuration is revalidated.

 # Safety
 `case` must be a live handle from [`desal_case_from_json`].
 */
enum DesalStatus desal_case_set_water_price(struct DesalCase *case_, double pi_water);

/*
 Compute the policy threshold set for a case.

 # Safety
 `case` must be a live handle and `out_thresholds` writable.
 */
enum DesalStatus desal_thresholds_compute(const struct DesalCase *case_,
                                          struct DesalThresholds **out_thresholds);

/*
 Release a thresholds handle. NULL is a no-op.

 # Safety
 `thresholds` must be a pointer previously returned by
 [`desal_thresholds_compute`] and not yet freed.
 */
void desal_thresholds_free(struct DesalThresholds *thresholds);

/*
 Serialize a threshold set to a JSON string owned by the caller; release
 it with [`desal_string_free`].

 # Safety
 `thresholds` must be a live handle and `out_json` writable.
 */
enum DesalStatus desal_thresholds_to_json(const struct DesalThresholds *thresholds,
                                          char **out_json);

/*
 Release a string allocated by this library. NULL is a no-op.

 # Safety
 `s` must be a pointer previously returned through an out-string parameter
 of this library and not yet freed.
 */
void desal_string_free(char *s);

/*
 Dispatch a renewable generation level against precomputed thresholds,
 filling `out` with the operating point, its profit, and its zone.

 # Safety
 `case` and `thresholds` must be live handles built from the same
 configuration; `out` must be writable.
 */
enum DesalStatus desal_optimal_dispatch(const struct DesalCase *case_,
                                        const struct DesalThresholds *thresholds,
                                        double g,
                                        struct DesalDispatch *out);

/*
 Certify the closed-form policy against both oracle solvers on generation
 samples `0, g_step, ..., ≤ g_max`. Writes 1 to `out_pass` on PASS, 0 on
 FAIL. `grid_steps` is the lattice resolution per axis (≥ 2).

 # Safety
 `case` must be a live handle and `out_pass` writable.
 */
enum DesalStatus desal_certify(const struct DesalCase *case_,
                               double g_max,
                               double g_step,
                               double tolerance,
                               uint32_t grid_steps,
                               int32_t *out_pass);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DESAL_H */
