#ifndef FLCHECK_H
#define FLCHECK_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible call.
typedef enum FlcStatus {
  FLC_STATUS_OK = 0,
  FLC_STATUS_NULL_POINTER = 1,
  FLC_STATUS_INVALID_UTF8 = 2,
  FLC_STATUS_PARSE = 3,
  FLC_STATUS_INVALID_INPUT = 4,
  FLC_STATUS_BAD_CHARACTERISTIC = 5,
  FLC_STATUS_UNSUPPORTED_ORDER = 6,
  FLC_STATUS_PRECISION_EXHAUSTED = 7,
  FLC_STATUS_WILD_RAMIFICATION = 8,
  FLC_STATUS_NOT_COPRIME = 9,
  FLC_STATUS_INCONSISTENT = 10,
  FLC_STATUS_NOT_G_REGULAR = 11,
  FLC_STATUS_NOT_REGULAR = 12,
  FLC_STATUS_UNSUPPORTED = 13,
  FLC_STATUS_COMBINATORIAL_BLOWUP = 14,
  FLC_STATUS_UNSUPPORTED_KAPPA = 15,
  FLC_STATUS_UNSUPPORTED_H = 16,
  FLC_STATUS_HYPOTHESIS_VIOLATED = 17,
  FLC_STATUS_DIVISION_BY_ZERO = 18,
  FLC_STATUS_IO = 19,
  FLC_STATUS_PANIC = 20,
} FlcStatus;

// Opaque parsed case file.
typedef struct FlcCase FlcCase;

// Opaque case report.
typedef struct FlcReport FlcReport;

// Global dimension formulas.
typedef struct FlcFormulas {
  int64_t dim_a;
  int64_t dim_pa;
  int64_t delta_sum_bound;
} FlcFormulas;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or NULL. Owned by the
// library; valid until the next call.
const char *flc_last_error(void);

// Library version string (static).
const char *flc_version(void);

// Parse a JSON case file.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum FlcStatus flc_case_from_json(const char *json, struct FlcCase **out);

// # Safety
// `case` must come from `flc_case_from_json` (or be NULL).
void flc_case_free(struct FlcCase *case_);

// Run a case. Errors inside the computation are recorded in the report;
// the status only reflects argument problems.
//
// # Safety
// `case` must be a live handle and `out` a valid pointer.
enum FlcStatus flc_run_case(const struct FlcCase *case_, struct FlcReport **out);

// 1 if the case passed, 0 if not, -1 for a NULL handle.
//
// # Safety
// `report` must be a live handle or NULL.
int32_t flc_report_pass(const struct FlcReport *report);

// Report as JSON with sorted keys. Free the result with `flc_string_free`.
//
// # Safety
// `report` must be a live handle and `out` a valid pointer.
enum FlcStatus flc_report_json(const struct FlcReport *report, char **out);

// # Safety
// `report` must come from `flc_run_case` (or be NULL).
void flc_report_free(struct FlcReport *report);

// # Safety
// `s` must come from this library (or be NULL).
void flc_string_free(char *s);

// Evaluate the global formulas for `kind` in {"GL", "SL", "PGL"}.
//
// # Safety
// `kind` must be a NUL-terminated string and `out` a valid pointer.
enum FlcStatus flc_global_formulas(const char *kind,
                                   uint32_t n,
                                   uint32_t p,
                                   int64_t genus,
                                   int64_t deg_d,
                                   struct FlcFormulas *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FLCHECK_H */
