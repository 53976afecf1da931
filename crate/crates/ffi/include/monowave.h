#ifndef MONOWAVE_H
#define MONOWAVE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum MwStatus {
  MW_STATUS_OK = 0,
  MW_STATUS_NULL_POINTER = 1,
  MW_STATUS_INVALID_ARGUMENT = 2,
  MW_STATUS_DEGENERATE = 3,
  MW_STATUS_IO = 4,
  MW_STATUS_PANIC = 5,
} MwStatus;

/**
 * One realization of a Gaussian comparison field.
 */
typedef struct MwGaussian MwGaussian;

/**
 * A deterministic monochromatic wave.
 */
typedef struct MwWave MwWave;

/**
 * Nodal statistics of a field sampled on B(center, radius).
 */
typedef struct MwNodalCounts {
  /**
   * Sign components not touching the boundary shell.
   */
  uintptr_t interior;
  /**
   * Sign components touching the boundary shell.
   */
  uintptr_t boundary;
  /**
   * Connected components of the extracted zero set.
   */
  uintptr_t zero_components;
  /**
   * Length (m = 2) or area (m = 3) of the zero set inside the ball.
   */
  double volume;
} MwNodalCounts;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next call into this library on the same thread.
 */
const char *mw_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *mw_version(void);

/**
 * Wave with `n` seeded uniform directions in R^m; random-phase coefficients
 * unless `all_ones` is non-zero.
 *
 * # Safety
 * `out` must be a valid pointer to a handle slot.
 */
enum MwStatus mw_wave_new_uniform(uintptr_t m,
                                  uintptr_t n,
                                  uint64_t seed,
                                  int32_t all_ones,
                                  struct MwWave **out);

/**
 * Wave from explicit terms: `directions` holds n unit vectors of length m
 * (row-major), `coeff_re` / `coeff_im` the n unit-modulus coefficients.
 *
 * # Safety
 * The arrays must hold `n * m`, `n` and `n` values; `out` must be valid.
 */
enum MwStatus mw_wave_new_from_terms(uintptr_t m,
                                     uintptr_t n,
                                     const double *directions,
                                     const double *coeff_re,
                                     const double *coeff_im,
                                     struct MwWave **out);

/**
 * # Safety
 * `wave` must be null or a handle from `mw_wave_new_*` not yet freed.
 */
void mw_wave_free(struct MwWave *wave);

/**
 * Dimension m, or 0 for a null handle.
 *
 * # Safety
 * `wave` must be null or a live handle.
 */
uintptr_t mw_wave_dim(const struct MwWave *wave);

/**
 * Number of directions N, or 0 for a null handle.
 *
 * # Safety
 * `wave` must be null or a live handle.
 */
uintptr_t mw_wave_count(const struct MwWave *wave);

/**
 * f(x) for a point of length `len` (must equal m).
 *
 * # Safety
 * `wave` live, `x` holds `len` values, `out` valid.
 */
enum MwStatus mw_wave_eval(const struct MwWave *wave, const double *x, uintptr_t len, double *out);

/**
 * ∇f(x) written to `grad` (length m).
 *
 * # Safety
 * `wave` live, `x` and `grad` hold `len` values.
 */
enum MwStatus mw_wave_eval_gradient(const struct MwWave *wave,
                                    const double *x,
                                    uintptr_t len,
                                    double *grad);

/**
 * Gaussian field with the uniform spectral measure on S^{m-1}, built from
 * `plane_waves` random plane waves.
 *
 * # Safety
 * `out` must be valid.
 */
enum MwStatus mw_gaussian_new_uniform(uintptr_t m,
                                      uintptr_t plane_waves,
                                      uint64_t seed,
                                      struct MwGaussian **out);

/**
 * Gaussian field whose spectral measure has atoms at the wave's directions.
 *
 * # Safety
 * `wave` live, `out` valid.
 */
enum MwStatus mw_gaussian_new_empirical(const struct MwWave *wave,
                                        uint64_t seed,
                                        struct MwGaussian **out);

/**
 * # Safety
 * `field` must be null or a live handle.
 */
void mw_gaussian_free(struct MwGaussian *field);

/**
 * F(x) for a point of length `len`.
 *
 * # Safety
 * `field` live, `x` holds `len` values, `out` valid.
 */
enum MwStatus mw_gaussian_eval(const struct MwGaussian *field,
                               const double *x,
                               uintptr_t len,
                               double *out);

/**
 * Samples the wave on B(center, radius) with spacing `h` and labels it.
 *
 * # Safety
 * `wave` live, `center` holds `len` values, `out` valid.
 */
enum MwStatus mw_wave_nodal_counts(const struct MwWave *wave,
                                   const double *center,
                                   uintptr_t len,
                                   double radius,
                                   double h,
                                   struct MwNodalCounts *out);

/**
 * As [`mw_wave_nodal_counts`] for a Gaussian field.
 *
 * # Safety
 * `field` live, `center` holds `len` values, `out` valid.
 */
enum MwStatus mw_gaussian_nodal_counts(const struct MwGaussian *field,
                                       const double *center,
                                       uintptr_t len,
                                       double radius,
                                       double h,
                                       struct MwNodalCounts *out);

/**
 * Kac–Rice zero-set density of the uniform measure on S^{m-1}.
 *
 * # Safety
 * `out` valid.
 */
enum MwStatus mw_kac_rice_uniform(uintptr_t m, double *out);

/**
 * Kac–Rice density of the wave's empirical direction measure, with the
 * Monte Carlo standard error.
 *
 * # Safety
 * `wave` live; `out_value` valid; `out_stderr` null or valid.
 */
enum MwStatus mw_kac_rice_wave(const struct MwWave *wave, double *out_value, double *out_stderr);

/**
 * Bessel function J_ν(z) for ν ≥ 0 integer or half-integer and z ≥ 0.
 *
 * # Safety
 * `out` valid.
 */
enum MwStatus mw_bessel_j(double nu, double z, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MONOWAVE_H */
