#ifndef ENTROPIC_UNCERTAINTY_H
#define ENTROPIC_UNCERTAINTY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum EuStatus {
  EU_STATUS_OK = 0,
  EU_STATUS_NULL_POINTER = 1,
  EU_STATUS_PRECONDITION = 2,
  EU_STATUS_DIMENSION = 3,
  EU_STATUS_DOMAIN = 4,
  EU_STATUS_PARSE = 5,
  EU_STATUS_VALIDATION = 6,
  EU_STATUS_USAGE = 7,
  EU_STATUS_INVALID_UTF8 = 8,
  EU_STATUS_PANIC = 9,
} EuStatus;

/**
 * Opaque measurement handle.
 */
typedef struct EuMeasurement EuMeasurement;

/**
 * Opaque density matrix handle.
 */
typedef struct EuState EuState;

/**
 * Headline numbers of an inequality report.
 */
typedef struct EuSummary {
  double slack;
  double tolerance;
  bool pass;
  /**
   * Number of chain links; zero for plain theorem checks.
   */
  size_t link_count;
  size_t failed_links;
} EuSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *eu_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *eu_version(void);

/**
 * Random density matrix `GG†/tr GG†` with a `dim × rank` Ginibre `G`.
 *
 * # Safety
 * `dims` points to `n_dims` values; `out` is writable.
 */
enum EuStatus eu_state_random(const size_t *dims,
                              size_t n_dims,
                              size_t rank,
                              uint64_t seed,
                              struct EuState **out);

/**
 * Maximally entangled state on `d ⊗ d`.
 *
 * # Safety
 * `out` is writable.
 */
enum EuStatus eu_state_maximally_entangled(size_t d, struct EuState **out);

/**
 * State from a row-major matrix of side `Π dims`. `im` may be null.
 *
 * # Safety
 * `re` (and `im` unless null) hold `(Π dims)²` values; `dims` holds
 * `n_dims` values; `out` is writable.
 */
enum EuStatus eu_state_from_matrix(const double *re,
                                   const double *im,
                                   const size_t *dims,
                                   size_t n_dims,
                                   struct EuState **out);

/**
 * Purification on `dims + [rank]` of a state with at most two factors.
 *
 * # Safety
 * `state` is a live handle; `out` is writable.
 */
enum EuStatus eu_state_purify(const struct EuState *state, struct EuState **out);

/**
 * Total dimension of the state, or 0 for a null handle.
 *
 * # Safety
 * `state` is null or a live handle.
 */
size_t eu_state_dim(const struct EuState *state);

/**
 * # Safety
 * `state` is null or a handle not yet freed.
 */
void eu_state_free(struct EuState *state);

/**
 * Computational-basis measurement.
 *
 * # Safety
 * `out` is writable.
 */
enum EuStatus eu_measurement_standard(size_t d, struct EuMeasurement **out);

/**
 * Fourier-basis measurement.
 *
 * # Safety
 * `out` is writable.
 */
enum EuStatus eu_measurement_dft(size_t d, struct EuMeasurement **out);

/**
 * Random `n`-outcome Kraus measurement.
 *
 * # Safety
 * `out` is writable.
 */
enum EuStatus eu_measurement_random(size_t d, size_t n, uint64_t seed, struct EuMeasurement **out);

/**
 * Measurement in a Haar-random orthonormal basis.
 *
 * # Safety
 * `out` is writable.
 */
enum EuStatus eu_measurement_haar_basis(size_t d, uint64_t seed, struct EuMeasurement **out);

/**
 * Measurement from `n` row-major `d × d` operators stored back to back.
 * `im` may be null.
 *
 * # Safety
 * `re` (and `im` unless null) hold `n·d²` values; `out` is writable.
 */
enum EuStatus eu_measurement_from_operators(const double *re,
                                            const double *im,
                                            size_t d,
                                            size_t n,
                                            struct EuMeasurement **out);

/**
 * # Safety
 * `m` is null or a handle not yet freed.
 */
void eu_measurement_free(struct EuMeasurement *m);

/**
 * `c₁ = max_{j,k} √tr(A_j†A_j B_k†B_k)`.
 *
 * # Safety
 * `a`, `b` are live handles; `out` is writable.
 */
enum EuStatus eu_c1(const struct EuMeasurement *a, const struct EuMeasurement *b, double *out);

/**
 * `c_∞ = max_{j,k} √‖B_k A_j†A_j B_k†‖`.
 *
 * # Safety
 * `a`, `b` are live handles; `out` is writable.
 */
enum EuStatus eu_c_infinity(const struct EuMeasurement *a,
                            const struct EuMeasurement *b,
                            double *out);

/**
 * Two-space relation on a bipartite state; measurements act on factor 1.
 *
 * # Safety
 * Handles are live; `out` is writable.
 */
enum EuStatus eu_two_space(const struct EuState *state,
                           const struct EuMeasurement *a,
                           const struct EuMeasurement *b,
                           struct EuSummary *out);

/**
 * Two-and-a-half-space relation on a bipartite state.
 *
 * # Safety
 * Handles are live; `out` is writable.
 */
enum EuStatus eu_two_half_space(const struct EuState *state,
                                const struct EuMeasurement *a,
                                const struct EuMeasurement *b,
                                struct EuSummary *out);

/**
 * Three-space relation on a tripartite state.
 *
 * # Safety
 * Handles are live; `out` is writable.
 */
enum EuStatus eu_three_space(const struct EuState *state,
                             const struct EuMeasurement *a,
                             const struct EuMeasurement *b,
                             struct EuSummary *out);

/**
 * Proof replay of the two-space relation. `delta ≤ 0` means no
 * regularization.
 *
 * # Safety
 * Handles are live; `out` is writable.
 */
enum EuStatus eu_proof_replay_two_space(const struct EuState *state,
                                        const struct EuMeasurement *a,
                                        const struct EuMeasurement *b,
                                        double delta,
                                        struct EuSummary *out);

/**
 * Proof replay of the two-and-a-half-space relation.
 *
 * # Safety
 * Handles are live; `out` is writable.
 */
enum EuStatus eu_proof_replay_two_half_space(const struct EuState *state,
                                             const struct EuMeasurement *a,
                                             const struct EuMeasurement *b,
                                             double delta,
                                             struct EuSummary *out);

/**
 * Runs a JSON scenario and renders the report as `human`, `json` or `csv`.
 * The rendered text is returned through `out` and must be released with
 * [`eu_string_free`]. `all_pass` may be null.
 *
 * # Safety
 * `scenario` and `format` are NUL-terminated; `out` is writable.
 */
enum EuStatus eu_run_scenario(const char *scenario, const char *format, char **out, bool *all_pass);

/**
 * # Safety
 * `s` is null or a string returned by this library and not yet freed.
 */
void eu_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ENTROPIC_UNCERTAINTY_H */
