#ifndef ALC_ENGINE_H
#define ALC_ENGINE_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum AlcStatus {
  ALC_STATUS_OK = 0,
  ALC_STATUS_NULL_POINTER = 1,
  ALC_STATUS_INVALID_UTF8 = 2,
  ALC_STATUS_INVALID_TYPE = 3,
  ALC_STATUS_INVALID_RANK = 4,
  ALC_STATUS_INVALID_NODES = 5,
  ALC_STATUS_PARSE = 6,
  ALC_STATUS_DIMENSION_MISMATCH = 7,
  ALC_STATUS_NOT_DOMINANT = 8,
  ALC_STATUS_NOT_INTEGRAL = 9,
  ALC_STATUS_CONSISTENCY = 10,
  ALC_STATUS_SINGULAR = 11,
  ALC_STATUS_REJECTED = 12,
  ALC_STATUS_IO = 13,
  ALC_STATUS_BUFFER_TOO_SMALL = 14,
  ALC_STATUS_PANIC = 15,
} AlcStatus;

/**
 * A parsed crossed Dynkin diagram.
 */
typedef struct AlcDiagram AlcDiagram;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. Owned by the library;
 * valid until the next failing call on the same thread.
 */
const char *alc_last_error(void);

/**
 * Parse a diagram such as `"B3:x@3"` or `"A5:x@2,4"`.
 *
 * # Safety
 * `spec` must be a nul-terminated string and `out` a valid pointer.
 */
enum AlcStatus alc_diagram_new(const char *spec, struct AlcDiagram **out);

/**
 * # Safety
 * `d` must come from [`alc_diagram_new`] and not be freed twice. Null is ignored.
 */
void alc_diagram_free(struct AlcDiagram *d);

/**
 * Rank of the underlying simple algebra.
 *
 * # Safety
 * `d` must be a live handle and `out` a valid pointer.
 */
enum AlcStatus alc_diagram_rank(const struct AlcDiagram *d, size_t *out);

/**
 * Growth vector. `len` receives the depth; if `cap` is too small nothing is
 * written to `buf` and `BufferTooSmall` is returned.
 *
 * # Safety
 * `d` must be a live handle, `buf` valid for `cap` writes, `len` valid.
 */
enum AlcStatus alc_diagram_growth(const struct AlcDiagram *d, size_t *buf, size_t cap, size_t *len);

/**
 * Run every candidate B for the diagram and write the JSON record to `out`.
 * `seed` and `sample_box` override the defaults when nonzero.
 *
 * # Safety
 * `d` must be a live handle and `out` a valid pointer.
 */
enum AlcStatus alc_diagram_check_json(const struct AlcDiagram *d,
                                      uint64_t seed,
                                      int64_t sample_box,
                                      char **out);

/**
 * Number of candidates that pass all checks, written to `out`.
 *
 * # Safety
 * `d` must be a live handle and `out` a valid pointer.
 */
enum AlcStatus alc_diagram_passing_count(const struct AlcDiagram *d, size_t *out);

/**
 * # Safety
 * `s` must come from this library. Null is ignored.
 */
void alc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ALC_ENGINE_H */
