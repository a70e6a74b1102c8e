#ifndef CONICAL_HARVEST_H
#define CONICAL_HARVEST_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ChStatus {
  CH_STATUS_OK = 0,
  CH_STATUS_NULL_POINTER = 1,
  CH_STATUS_INVALID_PARAMETER = 2,
  CH_STATUS_DIVERGENT_OVERLAP = 3,
  CH_STATUS_TOLERANCE_NOT_MET = 4,
  CH_STATUS_NO_SIGN_CHANGE = 5,
  CH_STATUS_NOT_UNIMODAL = 6,
  CH_STATUS_NUMERICAL_FAILURE = 7,
  CH_STATUS_OUT_OF_RANGE = 8,
  CH_STATUS_PANIC = 9,
} ChStatus;

// Values accepted wherever an alignment is passed as `uint32_t`.
typedef enum ChAlignment {
  CH_ALIGNMENT_FLAT = 0,
  CH_ALIGNMENT_PARALLEL = 1,
  CH_ALIGNMENT_ORTHOGONAL = 2,
  CH_ALIGNMENT_OPPOSITE = 3,
  CH_ALIGNMENT_BOUNDARY_PARALLEL = 4,
  CH_ALIGNMENT_BOUNDARY_ORTHOGONAL = 5,
} ChAlignment;

// Values accepted wherever a sweep axis is passed as `uint32_t`.
typedef enum ChAxis {
  CH_AXIS_L = 0,
  CH_AXIS_D = 1,
  CH_AXIS_NU = 2,
  CH_AXIS_GAP = 3,
} ChAxis;

// A validated detector pair and cone parameter.
typedef struct ChPair ChPair;

// Rows of a finished sweep.
typedef struct ChSweep ChSweep;

// Observables per λ².
typedef struct ChConcurrence {
  double p_a;
  double p_b;
  double abs_x;
  double concurrence;
} ChConcurrence;

// One sweep point. Observables are NaN when `computed` is 0.
typedef struct ChSweepRow {
  double param;
  double p_a;
  double p_b;
  double abs_x;
  double concurrence;
  uint8_t computed;
  uint8_t diverged;
} ChSweepRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *ch_version(void);

// Message for the last failed call on this thread, or NULL. The pointer is
// valid until the next call into the library from the same thread.
const char *ch_last_error(void);

// Faddeeva function w(z).
//
// # Safety
// `out_re` and `out_im` must be valid for writes.
enum ChStatus ch_faddeeva(double re, double im, double *out_re, double *out_im);

// Flat-spacetime transition probability per λ² for gap Ωσ. NaN for a
// negative or non-finite gap.
double ch_p_flat(double gap);

// Transition probability per λ² at distance `rho` from the string.
//
// # Safety
// `out` must be valid for writes.
enum ChStatus ch_p_string(double rho, double nu, double gap, double *out);

// Validates a configuration and returns a new handle in `*out`.
//
// # Safety
// `out` must be valid for writes. The handle must be released with
// [`ch_pair_free`].
enum ChStatus ch_pair_new(uint32_t alignment_code,
                          double nu,
                          double l,
                          double d,
                          double gap,
                          struct ChPair **out);

// # Safety
// `pair` must come from [`ch_pair_new`] and not be used afterwards. NULL is
// ignored.
void ch_pair_free(struct ChPair *pair);

// # Safety
// `pair` must be a live handle and `out` valid for writes.
enum ChStatus ch_pair_concurrence(const struct ChPair *pair, struct ChConcurrence *out);

// Largest harvesting separation for the pair's alignment, ν, l and gap.
// `*found` is 0 when no separation in `(0, d_hi]` harvests; `*d_max` is
// then NaN.
//
// # Safety
// `pair` must be a live handle; `d_max` and `found` valid for writes.
enum ChStatus ch_pair_d_max(const struct ChPair *pair,
                            double d_hi,
                            size_t grid_n,
                            double *d_max,
                            uint8_t *found);

// Runs a linear sweep along `axis_code` over `[lo, hi]` with `n` points,
// holding the other parameters fixed.
//
// # Safety
// `out` must be valid for writes; release the handle with [`ch_sweep_free`].
enum ChStatus ch_sweep_new(uint32_t alignment_code,
                           uint32_t axis_code,
                           double lo,
                           double hi,
                           size_t n,
                           double nu,
                           double l,
                           double d,
                           double gap,
                           struct ChSweep **out);

// Number of rows; 0 for NULL.
//
// # Safety
// `sweep` must be NULL or a live handle.
size_t ch_sweep_len(const struct ChSweep *sweep);

// # Safety
// `sweep` must be a live handle and `out` valid for writes.
enum ChStatus ch_sweep_row(const struct ChSweep *sweep, size_t index, struct ChSweepRow *out);

// # Safety
// `sweep` must come from [`ch_sweep_new`] and not be used afterwards. NULL
// is ignored.
void ch_sweep_free(struct ChSweep *sweep);

// Copies the last error message into `buf` (NUL-terminated, truncated to
// `len`). Returns the full message length, 0 when there is none.
//
// # Safety
// `buf` must be valid for `len` bytes, or NULL with `len` 0.
size_t ch_last_error_copy(char *buf, size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CONICAL_HARVEST_H */
