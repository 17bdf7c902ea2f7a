/* Generated by cbindgen from crates/ffi/src/lib.rs. */

#ifndef RCALG_H
#define RCALG_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RcalgStatus {
  RCALG_STATUS_OK = 0,
  RCALG_STATUS_NULL_ARGUMENT = 1,
  RCALG_STATUS_INVALID_UTF8 = 2,
  RCALG_STATUS_PARSE = 3,
  RCALG_STATUS_CAPACITY = 4,
  RCALG_STATUS_PRECONDITION = 5,
  RCALG_STATUS_USAGE = 6,
  RCALG_STATUS_DEGENERATE_QUOTIENT = 7,
  RCALG_STATUS_INCONSISTENT_EXTENSION = 8,
  RCALG_STATUS_PRESENTATION_INCONSISTENT = 9,
  RCALG_STATUS_ALGEBRA_MISMATCH = 10,
  RCALG_STATUS_IO = 11,
  RCALG_STATUS_PANIC = 12,
} RcalgStatus;

/**
 * A finite Boolean algebra with at most 64 atoms.
 */
typedef struct RcalgAlgebra RcalgAlgebra;

/**
 * A finished report with its JSON and text renderings.
 */
typedef struct RcalgReport RcalgReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success.
 * Valid until the next call on the same thread.
 */
const char *rcalg_last_error(void);

/**
 * Library version as a static string.
 */
const char *rcalg_version(void);

/**
 * Parses a JSON run spec and runs it.
 *
 * # Safety
 * `spec_json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum RcalgStatus rcalg_run_spec(const char *spec_json, bool timings, struct RcalgReport **out);

/**
 * Runs the oracle suite with the given seed.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum RcalgStatus rcalg_selftest(uint64_t seed, struct RcalgReport **out);

/**
 * True when the report has no invariant violations.
 *
 * # Safety
 * `r` must be null or a live report handle.
 */
bool rcalg_report_ok(const struct RcalgReport *r);

/**
 * # Safety
 * `r` must be null or a live report handle.
 */
size_t rcalg_report_section_count(const struct RcalgReport *r);

/**
 * Canonical JSON. Owned by the handle.
 *
 * # Safety
 * `r` must be null or a live report handle.
 */
const char *rcalg_report_json(const struct RcalgReport *r);

/**
 * Text rendering. Owned by the handle.
 *
 * # Safety
 * `r` must be null or a live report handle.
 */
const char *rcalg_report_text(const struct RcalgReport *r);

/**
 * # Safety
 * `r` must be null or a handle from this library, not yet freed.
 */
void rcalg_report_free(struct RcalgReport *r);

/**
 * The power set of `atoms` atoms, `1 <= atoms <= 64`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum RcalgStatus rcalg_algebra_new(size_t atoms, struct RcalgAlgebra **out);

/**
 * # Safety
 * `a` must be null or a live algebra handle.
 */
size_t rcalg_algebra_atom_count(const struct RcalgAlgebra *a);

/**
 * # Safety
 * `a` must be null or a handle from this library, not yet freed.
 */
void rcalg_algebra_free(struct RcalgAlgebra *a);

/**
 * Lower projection of `b` into the subalgebra generated by `gens`, as
 * atom bitsets (atom 0 is bit 0).
 *
 * # Safety
 * `gens` must point to `n_gens` values, `out` to writable memory.
 */
enum RcalgStatus rcalg_lpr(const struct RcalgAlgebra *a,
                           const uint64_t *gens,
                           size_t n_gens,
                           uint64_t b,
                           uint64_t *out);

/**
 * Whether the algebra is free over the subalgebra generated by `gens`.
 *
 * # Safety
 * `gens` must point to `n_gens` values, `out` to writable memory.
 */
enum RcalgStatus rcalg_is_free_over(const struct RcalgAlgebra *a,
                                    const uint64_t *gens,
                                    size_t n_gens,
                                    bool *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RCALG_H */
