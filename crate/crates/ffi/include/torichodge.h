#ifndef TORICHODGE_H
#define TORICHODGE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every function.
 */
typedef enum TchStatus {
  TCH_STATUS_OK = 0,
  TCH_STATUS_NULL_ARGUMENT = 1,
  TCH_STATUS_INVALID_UTF8 = 2,
  TCH_STATUS_INVALID_INPUT = 3,
  TCH_STATUS_PRECONDITION = 4,
  TCH_STATUS_HYPOTHESES = 5,
  TCH_STATUS_UNSTABLE_BOX = 6,
  TCH_STATUS_BUFFER_TOO_SMALL = 7,
  TCH_STATUS_UNSUPPORTED = 8,
  TCH_STATUS_PANIC = 9,
} TchStatus;

/**
 * Parsed input document.
 */
typedef struct TchDocument TchDocument;

/**
 * Summary of the fan and the equivariant setup of a document.
 */
typedef struct TchFanInfo {
  size_t rank;
  size_t num_rays;
  size_t num_max_cones;
  size_t relative_dim;
  bool simplicial;
  bool nonsingular;
  bool proper;
  bool log_smooth;
  /**
   * Free rank of Cl(P).
   */
  size_t class_group_rank;
} TchFanInfo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses a JSON document. On success `*out` owns a new handle.
 *
 * # Safety
 * `json` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum TchStatus tch_document_parse(const char *json, struct TchDocument **out);

/**
 * Releases a handle from [`tch_document_parse`]. Null is ignored.
 *
 * # Safety
 * `doc` must be null or a handle not yet freed.
 */
void tch_document_free(struct TchDocument *doc);

/**
 * Validates the fan and fills `*out`. An invalid fan yields `InvalidInput`.
 *
 * # Safety
 * `doc` must be a live handle and `out` a valid pointer.
 */
enum TchStatus tch_fan_info(const struct TchDocument *doc, struct TchFanInfo *out);

/**
 * Nef and ample verdicts for a named divisor.
 *
 * # Safety
 * `doc` must be a live handle, `name` a NUL-terminated string, and the
 * out pointers valid.
 */
enum TchStatus tch_divisor_positivity(const struct TchDocument *doc,
                                      const char *name,
                                      bool *nef,
                                      bool *ample);

/**
 * Cech cohomology dimensions h^0..h^dim of a log differential sheaf.
 *
 * `model` is `"tilde"`, `"logd"` or `"w:<r>"`; `divisor` may be null for the
 * trivial twist. `*len` receives the number of entries; if it exceeds `cap`
 * nothing is written to `h` and `BufferTooSmall` is returned.
 *
 * # Safety
 * `doc` must be a live handle, strings NUL-terminated, `h` valid for `cap`
 * writes and `len` a valid pointer.
 */
enum TchStatus tch_cohomology(const struct TchDocument *doc,
                              size_t p,
                              const char *model,
                              const char *divisor,
                              size_t *h,
                              size_t cap,
                              size_t *len);

/**
 * Dimension of the graded Jacobian piece computing h^{n-1-p, p} of the
 * hypersurface given by a named polynomial. Families over an affine base
 * yield `Unsupported`.
 *
 * # Safety
 * `doc` must be a live handle, `polynomial` NUL-terminated, `out` valid.
 */
enum TchStatus tch_hodge_dimension(const struct TchDocument *doc,
                                   const char *polynomial,
                                   size_t p,
                                   size_t *out);

/**
 * The same dimension computed through Cech cohomology of log forms.
 *
 * # Safety
 * As for [`tch_hodge_dimension`].
 */
enum TchStatus tch_hodge_oracle(const struct TchDocument *doc,
                                const char *polynomial,
                                size_t p,
                                size_t *out);

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `cap`). Returns the full message length excluding the NUL,
 * or 0 if there is no error.
 *
 * # Safety
 * `buf` must be null or valid for `cap` bytes.
 */
size_t tch_last_error(char *buf, size_t cap);

/**
 * Static name of a status code.
 */
const char *tch_status_name(enum TchStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TORICHODGE_H */
