#ifndef FLAGGED_EPP_H
#define FLAGGED_EPP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Number of cells in a flagged state and entries in a noise model.
 */
#define FEP_CELLS 16

typedef enum FepStatus {
  FEP_STATUS_OK = 0,
  FEP_STATUS_NULL_POINTER = 1,
  FEP_STATUS_NOT_NORMALIZED = 2,
  FEP_STATUS_NEGATIVE_PROBABILITY = 3,
  FEP_STATUS_DOMAIN = 4,
  FEP_STATUS_ORACLE_INCONSISTENT = 5,
  FEP_STATUS_ENSEMBLE_ANNIHILATED = 6,
  FEP_STATUS_EIGEN_SOLVER = 7,
  FEP_STATUS_NO_SIGN_CHANGE = 8,
  FEP_STATUS_UNREACHABLE = 9,
  FEP_STATUS_CONFIG = 10,
  FEP_STATUS_IO = 11,
  FEP_STATUS_JSON = 12,
  /**
   * A Rust panic was caught at the boundary; this is a bug.
   */
  FEP_STATUS_PANIC = 13,
} FepStatus;

typedef enum FepRegime {
  FEP_REGIME_HIGH_NOISE = 0,
  FEP_REGIME_INTERMEDIATE = 1,
  FEP_REGIME_SECURITY = 2,
} FepRegime;

/**
 * Opaque 16-cell flagged state.
 */
typedef struct FepFlaggedState FepFlaggedState;

/**
 * Opaque noise model: joint Pauli-error probabilities of a CNOT.
 */
typedef struct FepNoiseModel FepNoiseModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL if none failed yet.
 *
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *fep_last_error_message(void);

/**
 * Static, NUL-terminated name of a status code.
 */
const char *fep_status_name(enum FepStatus status);

/**
 * Library version as a static NUL-terminated string.
 */
const char *fep_version(void);

/**
 * # Safety
 * `out` must be NULL or valid for a pointer write.
 */
enum FepStatus fep_noise_noiseless(struct FepNoiseModel **out);

/**
 * Independent depolarizing noise on each qubit, per-qubit fidelity `f0`.
 *
 * # Safety
 * `out` must be NULL or valid for a pointer write.
 */
enum FepStatus fep_noise_one_qubit_white(double f0, struct FepNoiseModel **out);

/**
 * Two-qubit depolarizing noise with no-error probability `f`.
 *
 * # Safety
 * `out` must be NULL or valid for a pointer write.
 */
enum FepStatus fep_noise_two_qubit_white(double f, struct FepNoiseModel **out);

/**
 * Builds a model from 16 probabilities `f[mu][nu]`, row-major in Pauli order I, X, Y, Z.
 *
 * # Safety
 * `entries` must point to `len` readable doubles; `out` must be valid for a pointer write.
 */
enum FepStatus fep_noise_from_entries(const double *entries,
                                      size_t len,
                                      struct FepNoiseModel **out);

/**
 * Noise of `first` followed by `second`.
 *
 * # Safety
 * `first` and `second` must be live handles; `out` must be valid for a pointer write.
 */
enum FepStatus fep_noise_compose(const struct FepNoiseModel *first,
                                 const struct FepNoiseModel *second,
                                 struct FepNoiseModel **out);

/**
 * Copies the 16 entries into `buf`.
 *
 * # Safety
 * `noise` must be a live handle; `buf` must have room for 16 doubles.
 */
enum FepStatus fep_noise_entries(const struct FepNoiseModel *noise, double *buf);

/**
 * # Safety
 * `noise` must be NULL or a handle not yet freed.
 */
void fep_noise_free(struct FepNoiseModel *noise);

/**
 * Werner state of fidelity `f`, all flags clear.
 *
 * # Safety
 * `out` must be valid for a pointer write.
 */
enum FepStatus fep_state_werner(double f, struct FepFlaggedState **out);

/**
 * State from 16 normalized cell weights.
 *
 * # Safety
 * `cells` must point to `len` readable doubles; `out` must be valid for a pointer write.
 */
enum FepStatus fep_state_from_cells(const double *cells, size_t len, struct FepFlaggedState **out);

/**
 * Copies the 16 cell weights into `buf`.
 *
 * # Safety
 * `state` must be a live handle; `buf` must have room for 16 doubles.
 */
enum FepStatus fep_state_cells(const struct FepFlaggedState *state, double *buf);

/**
 * Writes the fidelity `F`, the flag-conditional fidelity and `1 - F_cond`.
 * Any of the out-pointers may be NULL.
 *
 * # Safety
 * `state` must be a live handle; non-NULL out-pointers must be writable.
 */
enum FepStatus fep_state_fidelities(const struct FepFlaggedState *state,
                                    double *fidelity,
                                    double *conditional,
                                    double *epsilon);

/**
 * One purification round. The input handle is left untouched.
 *
 * # Safety
 * `state` and `noise` must be live handles; `out` must be writable; `survival` may be NULL.
 */
enum FepStatus fep_state_step(const struct FepFlaggedState *state,
                              const struct FepNoiseModel *noise,
                              struct FepFlaggedState **out,
                              double *survival);

/**
 * Iterates up to `max_rounds` rounds, stopping early once successive states differ
 * by less than `tol`. Writes the final state and the number of rounds performed.
 *
 * # Safety
 * `state` and `noise` must be live handles; `out` must be writable; `rounds` may be NULL.
 */
enum FepStatus fep_state_iterate(const struct FepFlaggedState *state,
                                 const struct FepNoiseModel *noise,
                                 size_t max_rounds,
                                 double tol,
                                 struct FepFlaggedState **out,
                                 size_t *rounds);

/**
 * # Safety
 * `state` must be NULL or a handle not yet freed.
 */
void fep_state_free(struct FepFlaggedState *state);

/**
 * Critical per-qubit fidelity of the binary flagged map under uncorrelated noise,
 * bisected on `[lo, hi]` to tolerance `tol`.
 *
 * # Safety
 * `out` must be writable.
 */
enum FepStatus fep_critical_f0_binary(double lo, double hi, double tol, double *out);

/**
 * Bounds of the intermediate regime under one-qubit white noise.
 *
 * # Safety
 * `lower` and `upper` must be writable.
 */
enum FepStatus fep_critical_interval_white(double tol, double *lower, double *upper);

/**
 * Classifies the long-run behaviour of `state` under `noise` with default criteria.
 * `state` may be NULL to use the default starting state. `confident` may be NULL.
 *
 * # Safety
 * Non-NULL handles must be live; `label` must be writable.
 */
enum FepStatus fep_classify_regime(const struct FepNoiseModel *noise,
                                   const struct FepFlaggedState *state,
                                   enum FepRegime *label,
                                   bool *confident);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FLAGGED_EPP_H */
