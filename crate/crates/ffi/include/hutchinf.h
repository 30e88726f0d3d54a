#ifndef HUTCHINF_H
#define HUTCHINF_H

/* Generated by cbindgen. Do not edit. */

#include <stddef.h>
#include <stdint.h>

/**
 * Bumped whenever a signature or the meaning of a status code changes.
 */
#define HUTCHINF_ABI_VERSION 1

typedef enum HutchinfStatus {
  HUTCHINF_STATUS_OK = 0,
  HUTCHINF_STATUS_NULL_POINTER = 1,
  HUTCHINF_STATUS_INVALID_ARGUMENT = 2,
  HUTCHINF_STATUS_NOT_CONTRACTIVE = 3,
  HUTCHINF_STATUS_RESOURCE_CAP = 4,
  HUTCHINF_STATUS_UNSUPPORTED = 5,
  HUTCHINF_STATUS_IO = 6,
  HUTCHINF_STATUS_BUFFER_TOO_SMALL = 7,
  HUTCHINF_STATUS_PANIC = 8,
} HutchinfStatus;

typedef enum HutchinfMetric {
  HUTCHINF_METRIC_EUCLIDEAN = 0,
  HUTCHINF_METRIC_MAXIMUM = 1,
  HUTCHINF_METRIC_ABSOLUTE = 2,
} HutchinfMetric;

/**
 * A finite approximation of an attractor with its certified error.
 */
typedef struct HutchinfAttractor HutchinfAttractor;

/**
 * A generalized iterated function system.
 */
typedef struct HutchinfSystem HutchinfSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

uint32_t hutchinf_abi_version(void);

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `cap`). Returns the full message length plus one, so a
 * return value above `cap` means truncation.
 *
 * # Safety
 * `buf` must be null or valid for `cap` bytes.
 */
size_t hutchinf_last_error(char *buf, size_t cap);

/**
 * Builds a named system: "planar", "sup-pair", "sup-single",
 * "sup-interval" or "cantor".
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum HutchinfStatus hutchinf_system_builtin(const char *name, struct HutchinfSystem **out);

/**
 * Builds the system described by an experiment configuration document.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum HutchinfStatus hutchinf_system_from_json(const char *json, struct HutchinfSystem **out);

/**
 * # Safety
 * `sys` must be null or a handle from this library not yet freed.
 */
void hutchinf_system_free(struct HutchinfSystem *sys);

/**
 * Ambient dimension, or 0 for a null handle.
 *
 * # Safety
 * `sys` must be null or a live handle.
 */
size_t hutchinf_system_dim(const struct HutchinfSystem *sys);

/**
 * Certified Lipschitz constant of the system; fails with
 * `NotContractive` when no certificate is attached.
 *
 * # Safety
 * `sys` must be a live handle; `out` must be writable.
 */
enum HutchinfStatus hutchinf_system_lipschitz(const struct HutchinfSystem *sys, double *out);

/**
 * Approximates the attractor to Hausdorff error at most `tol`.
 *
 * # Safety
 * `sys` must be a live handle; `out` must be writable.
 */
enum HutchinfStatus hutchinf_attractor_compute(const struct HutchinfSystem *sys,
                                               double tol,
                                               struct HutchinfAttractor **out);

/**
 * # Safety
 * `a` must be null or a handle from this library not yet freed.
 */
void hutchinf_attractor_free(struct HutchinfAttractor *a);

/**
 * Number of points, or 0 for a null handle.
 *
 * # Safety
 * `a` must be null or a live handle.
 */
size_t hutchinf_attractor_len(const struct HutchinfAttractor *a);

/**
 * Point dimension, or 0 for a null handle.
 *
 * # Safety
 * `a` must be null or a live handle.
 */
size_t hutchinf_attractor_dim(const struct HutchinfAttractor *a);

/**
 * Certified Hausdorff distance from the approximation to the attractor.
 *
 * # Safety
 * `a` must be a live handle; `out` must be writable.
 */
enum HutchinfStatus hutchinf_attractor_error(const struct HutchinfAttractor *a, double *out);

/**
 * Copies the coordinates, point after point, into `buf`. Needs
 * `len * dim` slots; with fewer nothing is written and `BufferTooSmall`
 * is returned.
 *
 * # Safety
 * `a` must be a live handle; `buf` must be valid for `cap` doubles.
 */
enum HutchinfStatus hutchinf_attractor_points(const struct HutchinfAttractor *a,
                                              double *buf,
                                              size_t cap);

/**
 * Hausdorff distance between two finite sets given as flat coordinate
 * arrays of `a_len` and `b_len` points of dimension `dim`.
 *
 * # Safety
 * `a` and `b` must be valid for `a_len * dim` and `b_len * dim` doubles.
 */
enum HutchinfStatus hutchinf_hausdorff(const double *a,
                                       size_t a_len,
                                       const double *b,
                                       size_t b_len,
                                       size_t dim,
                                       enum HutchinfMetric metric,
                                       double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HUTCHINF_H */
