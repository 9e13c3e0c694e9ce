#ifndef FRAMEKIT_H
#define FRAMEKIT_H

#include <stdbool.h>
#include <stddef.h>

// Result code of every fallible call. Values are stable.
typedef enum FkStatus {
  FK_STATUS_OK = 0,
  FK_STATUS_NULL_POINTER = 1,
  FK_STATUS_INVALID_UTF8 = 2,
  FK_STATUS_PANIC = 3,
  FK_STATUS_INVALID_SYSTEM = 10,
  FK_STATUS_DIMENSION_MISMATCH = 11,
  FK_STATUS_NOT_SPANNING = 12,
  FK_STATUS_ZERO_NORM = 13,
  FK_STATUS_TOO_FEW_VECTORS = 14,
  FK_STATUS_COUNT_MISMATCH = 15,
  FK_STATUS_TOO_LARGE = 16,
  FK_STATUS_BAD_TARGET = 17,
  FK_STATUS_BAD_PARAMETER = 18,
  FK_STATUS_NOT_SEPARATED = 19,
  FK_STATUS_GUARANTEE_EMPTY = 20,
  FK_STATUS_INFEASIBLE_DELTA = 21,
  FK_STATUS_ROUND_LIMIT = 22,
  FK_STATUS_COVERAGE_SHORTFALL = 23,
  FK_STATUS_QUADRATURE_FAILURE = 24,
  FK_STATUS_NOT_FLAT = 25,
  FK_STATUS_EMPTY_INPUT = 26,
  FK_STATUS_SCHEMA_ERROR = 27,
  FK_STATUS_NUMERICAL = 28,
} FkStatus;

typedef enum FkSelectionMethod {
  FK_SELECTION_METHOD_EXHAUSTIVE = 0,
  FK_SELECTION_METHOD_GREEDY = 1,
} FkSelectionMethod;

typedef enum FkExtractionMode {
  FK_EXTRACTION_MODE_BIORTHOGONAL = 0,
  FK_EXTRACTION_MODE_FRAME = 1,
} FkExtractionMode;

// Opaque handle to a finite vector system.
typedef struct FkSystem FkSystem;

// Optimal frame bounds and norm range.
typedef struct FkFrameReport {
  double lower_bound;
  double upper_bound;
  double min_norm;
  double max_norm;
  bool is_tight;
  bool is_spanning;
} FkFrameReport;

// Basis constants; unbounded constants are `INFINITY`.
typedef struct FkBasisMetrics {
  double riesz;
  double hilbertian;
  double besselian;
  double schauder;
  double separation;
} FkBasisMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null after a success.
// The pointer stays valid until the next call into the library on this thread.
const char *fk_last_error_message(void);

// Library version as a static nul-terminated string.
const char *fk_version(void);

// Builds a system from `dim * count` column-major entries. `im` may be null
// for a real system.
//
// # Safety
// `re` (and `im` when non-null) must point to `dim * count` readable doubles;
// `out` must be writable.
enum FkStatus fk_system_new(size_t dim,
                            size_t count,
                            const double *re,
                            const double *im,
                            struct FkSystem **out);

// Parses the JSON system document.
//
// # Safety
// `json` must be a nul-terminated string; `out` must be writable.
enum FkStatus fk_system_from_json(const char *json, struct FkSystem **out);

// Serializes a system; release the string with [`fk_string_free`].
//
// # Safety
// `system` must be a live handle; `out` must be writable.
enum FkStatus fk_system_to_json(const struct FkSystem *system, char **out);

// Generates a gallery system from its JSON description.
//
// # Safety
// `spec_json` must be a nul-terminated string; `out` must be writable.
enum FkStatus fk_system_generate(const char *spec_json, struct FkSystem **out);

// Releases a handle. Null is a no-op.
//
// # Safety
// `system` must be null or a handle not yet freed.
void fk_system_free(struct FkSystem *system);

// Ambient dimension; 0 for null.
//
// # Safety
// `system` must be null or a live handle.
size_t fk_system_dim(const struct FkSystem *system);

// Number of vectors; 0 for null.
//
// # Safety
// `system` must be null or a live handle.
size_t fk_system_count(const struct FkSystem *system);

// Copies the columns out, column-major. `im` may be null.
//
// # Safety
// `re` (and `im` when non-null) must have room for `len` doubles.
enum FkStatus fk_system_columns(const struct FkSystem *system, double *re, double *im, size_t len);

// Frame bounds at `tolerance`.
//
// # Safety
// `system` must be a live handle; `out` must be writable.
enum FkStatus fk_frame_report(const struct FkSystem *system,
                              double tolerance,
                              struct FkFrameReport *out);

// The system `S^((a-1)/2) f_i`, whose frame operator is `S^a`.
//
// # Safety
// `system` must be a live handle; `out` must be writable.
enum FkStatus fk_power_transform(const struct FkSystem *system,
                                 double a,
                                 double tolerance,
                                 struct FkSystem **out);

// Riesz basis constant; `INFINITY` for dependent systems.
//
// # Safety
// `system` must be a live handle; `out` must be writable.
enum FkStatus fk_riesz_constant(const struct FkSystem *system, double *out);

// All basis constants, Schauder constant in storage order.
//
// # Safety
// `system` must be a live handle; `out` must be writable.
enum FkStatus fk_basis_metrics(const struct FkSystem *system, struct FkBasisMetrics *out);

// Selects `size` columns; writes `size` increasing indices to `indices` and
// the smallest singular value of the selection to `bound`.
//
// # Safety
// `system` must be a live handle; `indices` must have room for `size`
// entries; `bound` must be writable.
enum FkStatus fk_select(const struct FkSystem *system,
                        size_t size,
                        enum FkSelectionMethod method,
                        size_t *indices,
                        double *bound);

// Runs an extraction and writes its trace as JSON; release with
// [`fk_string_free`]. `delta` applies to frame mode; NaN selects the
// largest admissible value.
//
// # Safety
// `system` must be a live handle; `trace_json` must be writable.
enum FkStatus fk_extract(const struct FkSystem *system,
                         enum FkExtractionMode mode,
                         double eps,
                         double c,
                         double delta,
                         char **trace_json);

// Nominal round-count bound for biorthogonal extraction.
//
// # Safety
// `out` must be writable.
enum FkStatus fk_theoretical_bound(double eps, double d, double l, double c, double *out);

// Releases a string returned by the library. Null is a no-op.
//
// # Safety
// `text` must be null or a string from this library not yet freed.
void fk_string_free(char *text);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FRAMEKIT_H */
