#ifndef ISOVOL_H
#define ISOVOL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum IsovolMode {
  ISOVOL_MODE_AUTO = 0,
  ISOVOL_MODE_EXACT = 1,
  ISOVOL_MODE_RANDOMIZED = 2,
} IsovolMode;

typedef enum IsovolStatus {
  ISOVOL_STATUS_OK = 0,
  ISOVOL_STATUS_NULL_POINTER = 1,
  ISOVOL_STATUS_INVALID_UTF8 = 2,
  ISOVOL_STATUS_PARSE = 3,
  ISOVOL_STATUS_SHAPE = 4,
  ISOVOL_STATUS_PRECONDITION = 5,
  ISOVOL_STATUS_INCONSISTENT = 6,
  ISOVOL_STATUS_REFUSED = 7,
  ISOVOL_STATUS_UNSUPPORTED = 8,
  ISOVOL_STATUS_SAMPLING = 9,
  ISOVOL_STATUS_IO = 10,
  ISOVOL_STATUS_PANIC = 11,
} IsovolStatus;

/**
 * Opaque graph handle.
 */
typedef struct IsovolGraph IsovolGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses `text` in `format` (`graph6`, `dimacs`, `edgelist` or `dense`)
 * and stores a new handle in `*out`.
 *
 * # Safety
 * `text` and `format` must be nul-terminated strings; `out` must be valid
 * for writes.
 */
enum IsovolStatus isovol_graph_parse(const char *text,
                                     const char *format,
                                     struct IsovolGraph **out);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `g` must come from `isovol_graph_parse` and not be freed twice.
 */
void isovol_graph_free(struct IsovolGraph *g);

/**
 * Number of vertices, or 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live handle.
 */
size_t isovol_graph_order(const struct IsovolGraph *g);

/**
 * Runs the decision procedure and stores the JSON verdict in `*out_json`.
 * `*similar` is set to 1 for an exact or (epsilon, eta) similar verdict and
 * 0 otherwise; it may be null.
 *
 * # Safety
 * `a` and `b` must be live handles; `out_json` must be valid for writes and
 * `similar` null or valid for writes.
 */
enum IsovolStatus isovol_decide(const struct IsovolGraph *a,
                                const struct IsovolGraph *b,
                                double epsilon,
                                double eta,
                                uint64_t seed,
                                enum IsovolMode mode,
                                int32_t *similar,
                                char **out_json);

/**
 * Coherent closure of `g`: stores the basis dump followed by the structure
 * tensor dump in `*out`.
 *
 * # Safety
 * `g` must be a live handle and `out` valid for writes.
 */
enum IsovolStatus isovol_refine(const struct IsovolGraph *g, char **out);

/**
 * Brute-force similarity search for `n <= 12`; `*similar` receives 1 or 0.
 *
 * # Safety
 * `a` and `b` must be live handles and `similar` valid for writes.
 */
enum IsovolStatus isovol_oracle(const struct IsovolGraph *a,
                                const struct IsovolGraph *b,
                                int32_t *similar);

/**
 * Releases a string returned by this library; null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void isovol_string_free(char *s);

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next library call on the same thread.
 */
const char *isovol_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ISOVOL_H */
