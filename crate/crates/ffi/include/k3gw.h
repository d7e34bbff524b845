#ifndef K3GW_H
#define K3GW_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  K3GW_STATUS_OK = 0,
  K3GW_STATUS_NULL_POINTER = 1,
  K3GW_STATUS_INVALID_UTF8 = 2,
  K3GW_STATUS_PARSE = 3,
  K3GW_STATUS_RANK_BUDGET = 4,
  K3GW_STATUS_COMPUTATION = 5,
  K3GW_STATUS_PANIC = 6,
} K3gwStatus;

/**
 * Opaque evaluation context holding the memo table.
 */
typedef struct K3gwEngine K3gwEngine;

/**
 * New engine. `general_route` nonzero forces the general removal of `tau_k(1)`.
 * Returns null only on allocation failure.
 */
K3gwEngine *k3gw_engine_new(int32_t general_route);

/**
 * # Safety
 * `engine` is null or a handle from [`k3gw_engine_new`] not freed before.
 */
void k3gw_engine_free(K3gwEngine *engine);

/**
 * Number of memoized brackets held by `engine`, or 0 for null.
 *
 * # Safety
 * `engine` is null or a live handle.
 */
size_t k3gw_engine_memo_len(const K3gwEngine *engine);

/**
 * Exact invariant of `bracket` in the class with `beta^2 = 2 * beta_sq_half`, as `num/den`.
 *
 * # Safety
 * `engine` is a live handle; `bracket` a NUL-terminated string; `out` valid for writes.
 */
K3gwStatus k3gw_invariant(K3gwEngine *engine,
                          const char *bracket,
                          int64_t beta_sq_half,
                          char **out);

/**
 * Kernel `A_k` (`which = 'A'`), `B_k` (`'B'`) or `C_{k,l}` (`'C'`) as a polynomial in `G2, G4, G6`.
 *
 * # Safety
 * `out` valid for writes.
 */
K3gwStatus k3gw_kernel(char which, uint32_t k, uint32_t l, char **out);

/**
 * Polynomial fit of a family such as `tau(k,pt) tau(l,pt)`, as a JSON report.
 *
 * # Safety
 * As for [`k3gw_invariant`].
 */
K3gwStatus k3gw_fit(K3gwEngine *engine, const char *family, int64_t beta_sq_half, char **out);

/**
 * Coefficients `w_{k,m}` as a JSON report.
 *
 * # Safety
 * `engine` is a live handle; `out` valid for writes.
 */
K3gwStatus k3gw_virasoro(K3gwEngine *engine, int64_t k, char **out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` is null or a string from this library not freed before.
 */
void k3gw_string_free(char *s);

/**
 * Message for the last failed call on this thread, or null. Valid until the next call.
 */
const char *k3gw_last_error(void);

/**
 * Library version, statically allocated.
 */
const char *k3gw_version(void);

#endif  /* K3GW_H */
