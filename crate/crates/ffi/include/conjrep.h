#ifndef CONJREP_H
#define CONJREP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every entry point.
 */
typedef enum ConjrepStatus {
  CONJREP_STATUS_OK = 0,
  CONJREP_STATUS_NULL_POINTER = 1,
  CONJREP_STATUS_INVALID_ARGUMENT = 2,
  CONJREP_STATUS_BUDGET_EXCEEDED = 3,
  CONJREP_STATUS_INVARIANT_FAILED = 4,
  CONJREP_STATUS_BUFFER_TOO_SMALL = 5,
  CONJREP_STATUS_IO = 6,
  CONJREP_STATUS_PANIC = 7,
} ConjrepStatus;

/**
 * A built SL2(Z/p^nZ) with its classes; the character table and the
 * decomposition are computed on first request.
 */
typedef struct ConjrepGroup ConjrepGroup;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until the
 * next failing call on the same thread.
 */
const char *conjrep_last_error(void);

/**
 * Frees a string returned by this library. NULL is accepted.
 *
 * # Safety
 * `s` must be NULL or a pointer obtained from this library and not yet freed.
 */
void conjrep_string_free(char *s);

/**
 * Builds SL2(Z/p^nZ). A budget of 0 selects the default.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum ConjrepStatus conjrep_group_new(uint64_t p,
                                     uint32_t n,
                                     uint64_t budget,
                                     struct ConjrepGroup **out);

/**
 * Releases a handle. NULL is accepted.
 *
 * # Safety
 * `g` must be NULL or a handle from [`conjrep_group_new`] not yet freed.
 */
void conjrep_group_free(struct ConjrepGroup *g);

/**
 * # Safety
 * `g` must be a live handle and `order` writable.
 */
enum ConjrepStatus conjrep_group_order(const struct ConjrepGroup *g, uint64_t *order);

/**
 * Number of conjugacy classes.
 *
 * # Safety
 * `g` must be a live handle and `k` writable.
 */
enum ConjrepStatus conjrep_group_class_count(const struct ConjrepGroup *g, size_t *k);

/**
 * Copies the class sizes into `out`. `*len` receives the class count even
 * when the buffer is too small.
 *
 * # Safety
 * `g` must be a live handle, `out` valid for `cap` values, `len` writable.
 */
enum ConjrepStatus conjrep_group_class_sizes(const struct ConjrepGroup *g,
                                             uint64_t *out,
                                             size_t cap,
                                             size_t *len);

/**
 * Character degrees in table order (the trivial character first).
 *
 * # Safety
 * As for [`conjrep_group_class_sizes`]; `g` must not be used concurrently.
 */
enum ConjrepStatus conjrep_group_degrees(struct ConjrepGroup *g,
                                         uint64_t *out,
                                         size_t cap,
                                         size_t *len);

/**
 * Multiplicities of the irreducible characters in the conjugation
 * character, in table order.
 *
 * # Safety
 * As for [`conjrep_group_degrees`].
 */
enum ConjrepStatus conjrep_group_multiplicities(struct ConjrepGroup *g,
                                                uint64_t *out,
                                                size_t cap,
                                                size_t *len);

/**
 * Character table CSV as a newly allocated string, freed with
 * [`conjrep_string_free`].
 *
 * # Safety
 * `g` must be a live handle and `out` writable.
 */
enum ConjrepStatus conjrep_group_table_csv(struct ConjrepGroup *g, char **out);

/**
 * Runs the checks named in `checks` (comma-separated; NULL or empty for the
 * defaults) and returns the report JSON. `*pass` tells whether every check
 * passed. A budget of 0 selects the default.
 *
 * # Safety
 * `checks` must be NULL or a NUL-terminated string; `out` and `pass`
 * writable.
 */
enum ConjrepStatus conjrep_verify_json(uint64_t p,
                                       uint32_t n,
                                       uint64_t budget,
                                       const char *checks,
                                       char **out,
                                       bool *pass);

/**
 * Exhaustive Omega-orbit check over F_q for one form, given as a
 * [`ConjrepForm`] value.
 *
 * # Safety
 * `pass` must be writable.
 */
enum ConjrepStatus conjrep_f3(uint64_t q, uint32_t form, bool *pass);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CONJREP_H */
