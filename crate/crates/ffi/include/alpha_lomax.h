#ifndef ALPHA_LOMAX_H
#define ALPHA_LOMAX_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every function.
 */
typedef enum AlomaxStatus {
  ALOMAX_STATUS_OK = 0,
  ALOMAX_STATUS_INVALID_PARAMETER = 1,
  ALOMAX_STATUS_DOMAIN_ERROR = 2,
  ALOMAX_STATUS_INVALID_ARGUMENT = 3,
  ALOMAX_STATUS_CONVERGENCE_FAILURE = 4,
  ALOMAX_STATUS_NUMERIC_ERROR = 5,
  ALOMAX_STATUS_DIVERGENT = 6,
  ALOMAX_STATUS_PARSE_ERROR = 7,
  ALOMAX_STATUS_IO_ERROR = 8,
  ALOMAX_STATUS_NULL_POINTER = 9,
  ALOMAX_STATUS_PANIC = 10,
} AlomaxStatus;

/**
 * Metric selector for [`alomax_estimate`].
 */
typedef enum AlomaxMetric {
  ALOMAX_METRIC_OUTAGE = 0,
  ALOMAX_METRIC_BER = 1,
  ALOMAX_METRIC_CAPACITY = 2,
  ALOMAX_METRIC_BLER = 3,
} AlomaxMetric;

/**
 * Opaque channel handle.
 */
typedef struct AlomaxChannel AlomaxChannel;

/**
 * Auxiliary metric parameters; fields unused by the chosen metric are ignored.
 */
typedef struct AlomaxMetricConfig {
  /**
   * Outage threshold γ₀ (linear).
   */
  double gamma0;
  /**
   * Modulation constant φ (1 BPSK, 0.5 BFSK, 0.85 MSK).
   */
  double phi;
  uint32_t blocklength;
  uint32_t info_bits;
} AlomaxMetricConfig;

/**
 * Monte-Carlo estimate with its 95% interval.
 */
typedef struct AlomaxEstimate {
  double mean;
  double std_error;
  double ci95_low;
  double ci95_high;
  uint64_t n_used;
} AlomaxEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *alomax_last_error(void);

/**
 * Creates a channel with shapes α, λ (λ > 1/α) and linear mean SNR γ̄.
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum AlomaxStatus alomax_channel_new(double alpha,
                                     double lambda,
                                     double mean_snr,
                                     struct AlomaxChannel **out);

/**
 * Releases a channel. Null is ignored.
 *
 * # Safety
 * `ch` must come from [`alomax_channel_new`] and not have been freed.
 */
void alomax_channel_free(struct AlomaxChannel *ch);

/**
 * Shape parameter ζ of the channel.
 *
 * # Safety
 * `ch` must be a live handle and `out` valid for writing.
 */
enum AlomaxStatus alomax_channel_zeta(const struct AlomaxChannel *ch, double *out);

/**
 * SNR density f_Γ(γ).
 *
 * # Safety
 * `ch` must be a live handle and `out` valid for writing.
 */
enum AlomaxStatus alomax_pdf(const struct AlomaxChannel *ch, double gamma, double *out);

/**
 * SNR CDF F_Γ(γ).
 *
 * # Safety
 * `ch` must be a live handle and `out` valid for writing.
 */
enum AlomaxStatus alomax_cdf(const struct AlomaxChannel *ch, double gamma, double *out);

/**
 * Inverse CDF at probability `u` in [0, 1).
 *
 * # Safety
 * `ch` must be a live handle and `out` valid for writing.
 */
enum AlomaxStatus alomax_quantile(const struct AlomaxChannel *ch, double u, double *out);

/**
 * Moment `E[Γⁿ]` for real n < αλ.
 *
 * # Safety
 * `ch` must be a live handle and `out` valid for writing.
 */
enum AlomaxStatus alomax_moment(const struct AlomaxChannel *ch, double n, double *out);

/**
 * Generalised MGF E[Γⁿ e^(−sΓ)].
 *
 * # Safety
 * `ch` must be a live handle and `out` valid for writing.
 */
enum AlomaxStatus alomax_gmgf(const struct AlomaxChannel *ch, double n, double s, double *out);

/**
 * Outage probability at threshold γ₀.
 *
 * # Safety
 * `ch` must be a live handle and `out` valid for writing.
 */
enum AlomaxStatus alomax_outage(const struct AlomaxChannel *ch, double gamma0, double *out);

/**
 * Average BER of a coherent binary scheme with constant φ.
 *
 * # Safety
 * `ch` must be a live handle and `out` valid for writing.
 */
enum AlomaxStatus alomax_ber(const struct AlomaxChannel *ch, double phi, double *out);

/**
 * Ergodic capacity [bit/s/Hz].
 *
 * # Safety
 * `ch` must be a live handle and `out` valid for writing.
 */
enum AlomaxStatus alomax_capacity(const struct AlomaxChannel *ch, double *out);

/**
 * Average short-packet BLER for blocklength N and K information bits.
 *
 * # Safety
 * `ch` must be a live handle and `out` valid for writing.
 */
enum AlomaxStatus alomax_bler(const struct AlomaxChannel *ch,
                              uint32_t blocklength,
                              uint32_t info_bits,
                              double *out);

/**
 * Fills `buf[0..len]` with inverse-CDF SNR draws.
 *
 * # Safety
 * `ch` must be a live handle and `buf` valid for `len` doubles.
 */
enum AlomaxStatus alomax_sample_inverse(const struct AlomaxChannel *ch,
                                        uint64_t seed,
                                        double *buf,
                                        size_t len);

/**
 * Fills `buf[0..len]` with draws from the physical (Gaussian/Gamma) construction.
 *
 * # Safety
 * `ch` must be a live handle and `buf` valid for `len` doubles.
 */
enum AlomaxStatus alomax_sample_physical(const struct AlomaxChannel *ch,
                                         uint64_t seed,
                                         double *buf,
                                         size_t len);

/**
 * Monte-Carlo estimate of a metric; identical for any `n_streams`.
 *
 * # Safety
 * `ch` must be a live handle, `cfg` readable and `out` writable.
 */
enum AlomaxStatus alomax_estimate(const struct AlomaxChannel *ch,
                                  enum AlomaxMetric metric,
                                  const struct AlomaxMetricConfig *cfg,
                                  uint64_t seed,
                                  uint64_t n_samples,
                                  uint32_t n_streams,
                                  struct AlomaxEstimate *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ALPHA_LOMAX_H */
