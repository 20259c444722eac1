#ifndef SCIENTOSCOPE_H
#define SCIENTOSCOPE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ScInputFormat {
  SC_INPUT_FORMAT_CSV = 0,
  SC_INPUT_FORMAT_JSON = 1,
} ScInputFormat;

typedef enum ScMode {
  SC_MODE_STANDARD = 0,
  SC_MODE_PAPER = 1,
} ScMode;

typedef enum ScOutputFormat {
  SC_OUTPUT_FORMAT_TEXT = 0,
  SC_OUTPUT_FORMAT_CSV = 1,
  SC_OUTPUT_FORMAT_JSON = 2,
  SC_OUTPUT_FORMAT_MARKDOWN = 3,
} ScOutputFormat;

typedef enum ScStatus {
  SC_STATUS_OK = 0,
  SC_STATUS_NULL_POINTER = 1,
  SC_STATUS_INVALID_ARGUMENT = 2,
  SC_STATUS_PARSE = 3,
  SC_STATUS_VALIDATION = 4,
  SC_STATUS_ANALYSIS = 5,
  SC_STATUS_INTERNAL = 6,
  SC_STATUS_PANIC = 7,
} ScStatus;

/**
 * Opaque dataset handle.
 */
typedef struct ScDataset ScDataset;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The caller owns
 * the returned string.
 */
char *sc_last_error(void);

/**
 * Library version as a static string; do not free.
 */
const char *sc_version(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library and not yet freed.
 */
void sc_string_free(char *s);

/**
 * Parses `len` bytes as records or year aggregates (sniffed from the
 * header) and validates them. `strict` turns bin-sum mismatches into errors.
 *
 * # Safety
 * `data` must point to `len` readable bytes; `out` must be a valid pointer.
 */
enum ScStatus sc_dataset_parse(const uint8_t *data,
                               size_t len,
                               enum ScInputFormat format,
                               bool strict,
                               struct ScDataset **out);

/**
 * The bundled reference aggregates.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum ScStatus sc_dataset_demo(struct ScDataset **out);

/**
 * # Safety
 * `dataset` must be NULL or a handle from this library that is not yet freed.
 */
void sc_dataset_free(struct ScDataset *dataset);

/**
 * Papers in the dataset (records, or the sum of yearly counts); 0 for NULL.
 *
 * # Safety
 * `dataset` must be NULL or a live handle.
 */
uint64_t sc_dataset_total_papers(const struct ScDataset *dataset);

/**
 * Validation report as a JSON document.
 *
 * # Safety
 * `dataset` must be a live handle; `out_json` must be a valid pointer.
 */
enum ScStatus sc_dataset_validate_json(const struct ScDataset *dataset, char **out_json);

/**
 * Renders table `table` (1-8, or 0 for all eight) behind a metadata line.
 *
 * # Safety
 * `dataset` must be a live handle; `out` must be a valid pointer.
 */
enum ScStatus sc_analyze(const struct ScDataset *dataset,
                         uint8_t table,
                         enum ScMode mode,
                         enum ScOutputFormat format,
                         char **out);

/**
 * Degree of collaboration `Nm / (Nm + Ns)`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum ScStatus sc_degree_of_collaboration(uint64_t single, uint64_t multiple, double *out);

/**
 * Collaborative index. The printed variant (`stated = false`) is `Nm / Ns`;
 * the stated variant is `authors / (Ns + Nm)`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum ScStatus sc_collaborative_index(uint64_t single,
                                     uint64_t multiple,
                                     uint64_t authors,
                                     bool stated,
                                     double *out);

/**
 * Compound annual growth rate in percent over `periods` periods.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum ScStatus sc_cagr(uint64_t first, uint64_t last, uint32_t periods, double *out);

/**
 * `value` rounded half-up to `decimals` places, as text.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum ScStatus sc_round_display(double value, uint32_t decimals, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SCIENTOSCOPE_H */
