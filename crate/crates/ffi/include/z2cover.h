#ifndef Z2COVER_H
#define Z2COVER_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum Z2cStatus {
  Z2C_STATUS_OK = 0,
  Z2C_STATUS_NULL_POINTER = 1,
  Z2C_STATUS_INVALID_ARGUMENT = 2,
  Z2C_STATUS_DOMAIN_ERROR = 3,
  Z2C_STATUS_VERIFICATION_FAILED = 4,
  Z2C_STATUS_PANIC = 5,
} Z2cStatus;

/**
 * A fully built family report.
 */
typedef struct Z2cFamilyReport Z2cFamilyReport;

/**
 * A surface `F_e` with its blow-ups.
 */
typedef struct Z2cSurface Z2cSurface;

/**
 * Plain-data view of a report.
 */
typedef struct Z2cSummary {
  uint32_t family;
  int64_t n;
  int64_t k2;
  int64_t pg;
  int64_t chi;
  int64_t q;
  int64_t map_degree;
  int64_t image_degree;
  bool bpf;
  bool has_nodes;
  int64_t nodes;
  /**
   * All internal consistency checks passed.
   */
  bool consistent;
} Z2cSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until the
 * next call into the library on this thread.
 */
const char *z2c_last_error_message(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library and not yet freed.
 */
void z2c_string_free(char *s);

/**
 * # Safety
 * `out` must be a valid pointer to writable storage.
 */
enum Z2cStatus z2c_surface_hirzebruch(uint32_t e, struct Z2cSurface **out);

/**
 * Blows up one more point; the input handle is left untouched.
 *
 * # Safety
 * `surface` must be a live handle, `out` valid for writing.
 */
enum Z2cStatus z2c_surface_blow_up(const struct Z2cSurface *surface, struct Z2cSurface **out);

/**
 * # Safety
 * `surface` must be null or a live handle.
 */
void z2c_surface_free(struct Z2cSurface *surface);

/**
 * Number of coordinates in a class: `2 + blow-ups`.
 *
 * # Safety
 * `surface` must be null or a live handle.
 */
size_t z2c_surface_basis_size(const struct Z2cSurface *surface);

/**
 * # Safety
 * `a` and `b` must point to `len` readable values; `out` must be writable.
 */
enum Z2cStatus z2c_surface_intersect(const struct Z2cSurface *surface,
                                     const int64_t *a,
                                     const int64_t *b,
                                     size_t len,
                                     int64_t *out);

/**
 * Writes the canonical class into `buf`, which holds `len` values.
 *
 * # Safety
 * `buf` must point to `len` writable values.
 */
enum Z2cStatus z2c_surface_canonical_class(const struct Z2cSurface *surface,
                                           int64_t *buf,
                                           size_t len);

/**
 * `h⁰` of a class, with positive exceptional parts split off as fixed
 * components.
 *
 * # Safety
 * `class_coords` must point to `len` readable values; `out` must be writable.
 */
enum Z2cStatus z2c_surface_h0(const struct Z2cSurface *surface,
                              const int64_t *class_coords,
                              size_t len,
                              uint64_t *out);

/**
 * # Safety
 * `k` must point to `len` readable values; `out` must be writable.
 */
enum Z2cStatus z2c_validate_point_type(const int64_t *k, size_t len, bool *out);

/**
 * Builds family `id` (1 to 9) at parameter `n`.
 *
 * # Safety
 * `out` must be writable.
 */
enum Z2cStatus z2c_family_build(uint32_t id, int64_t n, struct Z2cFamilyReport **out);

/**
 * # Safety
 * `report` must be null or a live handle.
 */
void z2c_family_free(struct Z2cFamilyReport *report);

/**
 * # Safety
 * `report` must be a live handle, `out` writable.
 */
enum Z2cStatus z2c_family_summary(const struct Z2cFamilyReport *report, struct Z2cSummary *out);

/**
 * The report as JSON, including building data and tower. Free with
 * [`z2c_string_free`].
 *
 * # Safety
 * `report` must be a live handle, `out` writable.
 */
enum Z2cStatus z2c_family_json(const struct Z2cFamilyReport *report, char **out);

/**
 * The nine-row table as CSV. Free with [`z2c_string_free`].
 *
 * # Safety
 * `out` must be writable.
 */
enum Z2cStatus z2c_table_csv(int64_t n, char **out);

/**
 * Runs the self-check suite over `n_lo..=n_hi`. Returns
 * `VerificationFailed` if any check fails; `summary`, if non-null, receives
 * the text report either way and must be freed with [`z2c_string_free`].
 *
 * # Safety
 * `summary` must be null or writable.
 */
enum Z2cStatus z2c_verify(int64_t n_lo, int64_t n_hi, char **summary);

/**
 * Library version as a static string.
 */
const char *z2c_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* Z2COVER_H */
