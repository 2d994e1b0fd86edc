#ifndef FEMTOACCESS_H
#define FEMTOACCESS_H

#include <stdbool.h>
#include <stdint.h>
#include <stddef.h>

/**
 * Scheme selector: time division.
 */
#define FA_SCHEME_TDMA 0

/**
 * Scheme selector: code division.
 */
#define FA_SCHEME_CDMA 1

/**
 * Access selector: open (hybrid) access.
 */
#define FA_ACCESS_OPEN 0

/**
 * Access selector: closed access.
 */
#define FA_ACCESS_CLOSED 1

typedef enum {
  FA_STATUS_OK = 0,
  FA_STATUS_NULL_POINTER = 1,
  FA_STATUS_INVALID_ARGUMENT = 2,
  FA_STATUS_INVALID_CONFIG = 3,
  FA_STATUS_INVALID_POLICY = 4,
  FA_STATUS_DEGENERATE_PLACEMENT = 5,
  FA_STATUS_NOT_FOUND = 6,
  FA_STATUS_IO = 7,
  FA_STATUS_PANIC = 99,
} FaStatus;

/**
 * Network configuration handle.
 */
typedef struct FaConfig FaConfig;

/**
 * Resource-allocation policy handle.
 */
typedef struct FaPolicy FaPolicy;

typedef struct {
  double value;
  double std_error;
} FaEstimate;

typedef struct {
  double c0;
  double csum;
  double csum_macro;
  double se_c0;
  double se_csum;
  double se_csum_macro;
  uint64_t n;
  uint64_t k;
} FaRateReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *fa_version(void);

/**
 * Message for the last failed call on this thread, or null. Valid until the
 * next call into the library on the same thread.
 */
const char *fa_last_error_message(void);

/**
 * Default network parameters.
 */
FaStatus fa_config_new_default(FaConfig **out);

/**
 * Parses `key = value` lines over the defaults.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
FaStatus fa_config_from_kv(const char *text, FaConfig **out);

/**
 * Sets one parameter and revalidates; on failure the handle is unchanged.
 *
 * # Safety
 * `cfg` must be a live handle and `key` a NUL-terminated string.
 */
FaStatus fa_config_set(FaConfig *cfg, const char *key, double value);

/**
 * # Safety
 * `cfg` must be a live handle, `key` a NUL-terminated string and `out` writable.
 */
FaStatus fa_config_get(const FaConfig *cfg, const char *key, double *out);

/**
 * # Safety
 * `cfg` must be null or a handle not yet freed.
 */
void fa_config_free(FaConfig *cfg);

/**
 * `lambda_L = 1 - L/N`, `mu_L = 1/N` for up to `k` admitted users.
 */
FaStatus fa_policy_proportional(uint64_t k, FaPolicy **out);

/**
 * `lambda_L = lambda`, `mu_L = (1 - lambda)/L`.
 */
FaStatus fa_policy_fixed_lambda(uint64_t k, double lambda, FaPolicy **out);

/**
 * Explicit per-level shares; `len = K + 1`, entry 0 is the no-handoff level.
 *
 * # Safety
 * `lambda` and `mu` must each point to `len` readable doubles.
 */
FaStatus fa_policy_explicit(const double *lambda, const double *mu, uintptr_t len, FaPolicy **out);

/**
 * # Safety
 * `p` must be null or a handle not yet freed.
 */
void fa_policy_free(FaPolicy *p);

/**
 * CDF of one user's interference factor.
 *
 * # Safety
 * `cfg` must be a live handle and `out` writable.
 */
FaStatus fa_cdf_interference(const FaConfig *cfg, double i, double *out);

/**
 * Upper bound `F(i)^k` on the CDF of a sum of `k` interference factors.
 *
 * # Safety
 * `cfg` must be a live handle and `out` writable.
 */
FaStatus fa_cdf_sum_upper(const FaConfig *cfg, uint32_t k, double i, double *out);

/**
 * Monte Carlo CDF of a sum of `k` interference factors.
 *
 * # Safety
 * `cfg` must be a live handle and `out` writable.
 */
FaStatus fa_cdf_sum_mc(const FaConfig *cfg,
                       uint32_t k,
                       double i,
                       uint64_t reps,
                       uint64_t seed,
                       FaEstimate *out);

/**
 * Closed-access cutoff load. `rate_scaled` selects the rate-scaled CDMA
 * feasibility condition and is ignored for TDMA.
 *
 * # Safety
 * `cfg` must be a live handle and `out` writable.
 */
FaStatus fa_cutoff_closed(const FaConfig *cfg, uint32_t scheme_id, bool rate_scaled, uint64_t *out);

/**
 * Open-access cutoff load found by Monte Carlo search up to `n_max`.
 *
 * # Safety
 * `cfg` and `p` must be live handles and `out` writable.
 */
FaStatus fa_cutoff_open(const FaConfig *cfg,
                        const FaPolicy *p,
                        uint32_t scheme_id,
                        double eps,
                        uint64_t n_max,
                        uint64_t reps,
                        uint64_t seed,
                        uint64_t *out);

/**
 * Exact closed-access TDMA rates.
 *
 * # Safety
 * `cfg` must be a live handle and `out` writable.
 */
FaStatus fa_closed_access_tdma(const FaConfig *cfg, uint64_t n, FaRateReport *out);

/**
 * Exact open-access TDMA rates with one admitted user.
 *
 * # Safety
 * `cfg` and `p` must be live handles and `out` writable.
 */
FaStatus fa_open_access_tdma_k1(const FaConfig *cfg,
                                const FaPolicy *p,
                                uint64_t n,
                                FaRateReport *out);

/**
 * Monte Carlo rates for any scheme, access mode and policy.
 *
 * # Safety
 * `cfg` and `p` must be live handles and `out` writable.
 */
FaStatus fa_estimate(const FaConfig *cfg,
                     const FaPolicy *p,
                     uint64_t n,
                     uint32_t scheme_id,
                     uint32_t access_id,
                     uint64_t reps,
                     uint64_t seed,
                     FaRateReport *out);

/**
 * Lower bound on the open-access CDMA home-user rate.
 *
 * # Safety
 * `cfg` and `p` must be live handles and `out` writable.
 */
FaStatus fa_home_rate_lower_bound_cdma(const FaConfig *cfg,
                                       const FaPolicy *p,
                                       uint64_t n,
                                       uint64_t reps,
                                       uint64_t seed,
                                       FaEstimate *out);

/**
 * Lower bound on the open-access CDMA sum throughput with one admitted user.
 *
 * # Safety
 * `cfg` and `p` must be live handles and `out` writable.
 */
FaStatus fa_sum_throughput_lower_bound_cdma_k1(const FaConfig *cfg,
                                               const FaPolicy *p,
                                               uint64_t n,
                                               uint64_t reps,
                                               uint64_t seed,
                                               FaEstimate *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FEMTOACCESS_H */
