#ifndef FAKEPLANE_H
#define FAKEPLANE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FpStatus {
  FP_STATUS_OK = 0,
  FP_STATUS_NULL_POINTER = 1,
  FP_STATUS_INVALID_UTF8 = 2,
  FP_STATUS_CONFIG = 3,
  FP_STATUS_INVALID_ARGUMENT = 4,
  FP_STATUS_NOT_AN_INTEGER = 5,
  FP_STATUS_UNSUPPORTED = 6,
  FP_STATUS_MATH = 7,
  FP_STATUS_BUFFER_TOO_SMALL = 8,
  FP_STATUS_PANIC = 9,
} FpStatus;

/**
 * Configuration handle.
 */
typedef struct FpConfig FpConfig;

/**
 * Fixed-point class dataset handle.
 */
typedef struct FpDataset FpDataset;

/**
 * Verification report handle.
 */
typedef struct FpReport FpReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread, or null. Free with
 * `fp_string_free`.
 */
char *fp_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void fp_string_free(char *s);

/**
 * # Safety
 * `out` must be a valid pointer.
 */
enum FpStatus fp_config_default(struct FpConfig **out);

/**
 * # Safety
 * `json` must be a nul-terminated string and `out` a valid pointer.
 */
enum FpStatus fp_config_from_json(const char *json, struct FpConfig **out);

/**
 * # Safety
 * `cfg` must be null or a handle from `fp_config_*`, not yet freed.
 */
void fp_config_free(struct FpConfig *cfg);

/**
 * Covolume as `p/q`.
 *
 * # Safety
 * `cfg` must be a live config handle and `out` a valid pointer.
 */
enum FpStatus fp_covolume(const struct FpConfig *cfg, char **out);

/**
 * # Safety
 * `cfg` must be a live config handle and `out` a valid pointer.
 */
enum FpStatus fp_report_run(const struct FpConfig *cfg, struct FpReport **out);

/**
 * # Safety
 * `report` must be a live report handle.
 */
size_t fp_report_entry_count(const struct FpReport *report);

/**
 * 0 when no entry is a mismatch, 1 otherwise; -1 for a null handle.
 *
 * # Safety
 * `report` must be null or a live report handle.
 */
int32_t fp_report_exit_code(const struct FpReport *report);

/**
 * # Safety
 * `report` must be a live report handle and `out` a valid pointer.
 */
enum FpStatus fp_report_to_json(const struct FpReport *report, char **out);

/**
 * # Safety
 * `report` must be a live report handle and `out` a valid pointer.
 */
enum FpStatus fp_report_to_markdown(const struct FpReport *report, char **out);

/**
 * # Safety
 * `report` must be null or a handle from `fp_report_run`, not yet freed.
 */
void fp_report_free(struct FpReport *report);

/**
 * Dataset for `"gamma"` or `"gamma-tilde"`, honouring dataset paths in `cfg`.
 *
 * # Safety
 * `cfg` must be a live config handle, `group` a nul-terminated string and
 * `out` a valid pointer.
 */
enum FpStatus fp_dataset_load(const struct FpConfig *cfg,
                              const char *group,
                              struct FpDataset **out);

/**
 * # Safety
 * `json` must be a nul-terminated string and `out` a valid pointer.
 */
enum FpStatus fp_dataset_from_json(const char *json, struct FpDataset **out);

/**
 * # Safety
 * `ds` must be a live dataset handle and `out` a valid pointer.
 */
enum FpStatus fp_dataset_dimension(const struct FpDataset *ds, uint32_t weight, int64_t *out);

/**
 * # Safety
 * `ds` must be null or a handle from `fp_dataset_*`, not yet freed.
 */
void fp_dataset_free(struct FpDataset *ds);

/**
 * Self-intersections of the resolution chain of `(n, q)`. `*len` receives
 * the chain length even when `cap` is too small.
 *
 * # Safety
 * `buf` must hold `cap` values (may be null when `cap` is 0) and `len` must
 * be a valid pointer.
 */
enum FpStatus fp_hj_expand(uint32_t n, uint32_t q, int64_t *buf, size_t cap, size_t *len);

/**
 * `s(q, n)` as a reduced fraction.
 *
 * # Safety
 * `num` and `den` must be valid pointers.
 */
enum FpStatus fp_dedekind_sum(int64_t q, int64_t n, int64_t *num, int64_t *den);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FAKEPLANE_H */
