#ifndef QCAP_H
#define QCAP_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

typedef enum QcapStatus {
  QCAP_STATUS_OK = 0,
  QCAP_STATUS_NULL_POINTER = 1,
  QCAP_STATUS_INVALID_ARGUMENT = 2,
  QCAP_STATUS_DIMENSION_MISMATCH = 3,
  QCAP_STATUS_INVALID_STATE = 4,
  QCAP_STATUS_NOT_COMPLETE = 5,
  QCAP_STATUS_NON_CONVERGENCE = 6,
  QCAP_STATUS_CANCELLED = 7,
  QCAP_STATUS_INFEASIBLE = 8,
  QCAP_STATUS_LIMIT_EXCEEDED = 9,
  QCAP_STATUS_PARSE = 10,
  QCAP_STATUS_IO = 11,
  QCAP_STATUS_PANIC = 12,
} QcapStatus;

/**
 * Opaque quantum channel.
 */
typedef struct QcapChannel QcapChannel;

/**
 * Opaque discrete memoryless channel.
 */
typedef struct QcapDmc QcapDmc;

/**
 * Outcome of [`qcap_ce_maximize`].
 */
typedef struct QcapCeResult {
  double value;
  double gap_bound;
  size_t iterations;
} QcapCeResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer
 * stays valid until the next `qcap_*` call on the same thread.
 */
const char *qcap_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *qcap_version(void);

/**
 * Build a channel from a preset such as `"amplitude-damping:0.5"`.
 *
 * # Safety
 * `preset` must be a NUL-terminated string; `out` must be writable.
 */
enum QcapStatus qcap_channel_from_preset(const char *preset, struct QcapChannel **out);

/**
 * Build a channel from ChannelSpec JSON.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum QcapStatus qcap_channel_from_json(const char *json, struct QcapChannel **out);

/**
 * # Safety
 * `ch` must come from a `qcap_channel_*` constructor and not be freed twice.
 */
void qcap_channel_free(struct QcapChannel *ch);

/**
 * # Safety
 * `ch` must be a live channel; `d_in` and `d_out` must be writable.
 */
enum QcapStatus qcap_channel_dims(const struct QcapChannel *ch, size_t *d_in, size_t *d_out);

/**
 * Entanglement-assisted capacity in bits. On non-convergence the best
 * iterate is still written to `out`.
 *
 * # Safety
 * `ch` must be a live channel; `out` must be writable.
 */
enum QcapStatus qcap_ce_maximize(const struct QcapChannel *ch,
                                 double tol,
                                 struct QcapCeResult *out);

/**
 * Closed-form entanglement-assisted capacity of the bosonic Gaussian channel.
 *
 * # Safety
 * `out` must be writable.
 */
enum QcapStatus qcap_gaussian_ce(double s, double n, double k, double *out);

/**
 * Large-noise limit of the assisted-to-unassisted capacity ratio.
 *
 * # Safety
 * `out` must be writable.
 */
enum QcapStatus qcap_ce_over_cshan_limit(double s, double *out);

/**
 * DMC from a row-major `d_in x d_out` table of `P(y|x)`.
 *
 * # Safety
 * `matrix` must point to `d_in * d_out` doubles; `out` must be writable.
 */
enum QcapStatus qcap_dmc_new(const double *matrix, size_t d_in, size_t d_out, struct QcapDmc **out);

/**
 * # Safety
 * `dmc` must come from [`qcap_dmc_new`] and not be freed twice.
 */
void qcap_dmc_free(struct QcapDmc *dmc);

/**
 * Shannon capacity in bits; `q_out`, if not NULL, receives the
 * `d_in` entries of the optimal input distribution.
 *
 * # Safety
 * `dmc` must be live; `capacity` writable; `q_out` NULL or `d_in` doubles.
 */
enum QcapStatus qcap_dmc_capacity(const struct QcapDmc *dmc,
                                  double tol,
                                  double *capacity,
                                  double *q_out);

/**
 * Exhaustive faithfulness check of the simulation protocol; writes the
 * largest deviation from the simulated channel. `dmc` NULL selects the
 * BSC variant with crossover `p`, otherwise the general variant on `dmc`.
 *
 * # Safety
 * `dmc` NULL or live; `deviation` writable.
 */
enum QcapStatus qcap_rst_verify_exact(const struct QcapDmc *dmc,
                                      double p,
                                      size_t n,
                                      uint64_t z_size,
                                      double *deviation);

/**
 * Typical-subspace properties for a state with eigenvalues `probs`.
 * `ok` receives three flags (0/1); `trace_mass` the exact projected mass.
 *
 * # Safety
 * `probs` points to `d` doubles; `ok` to 3 bytes; `trace_mass` writable.
 */
enum QcapStatus qcap_typical_check(const double *probs,
                                   size_t d,
                                   size_t n,
                                   double delta,
                                   double epsilon,
                                   uint8_t *ok,
                                   double *trace_mass);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QCAP_H */
