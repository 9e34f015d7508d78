#ifndef QMLBENCH_H
#define QMLBENCH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QmbStatus {
  QMB_STATUS_OK = 0,
  QMB_STATUS_CONFIG = 1,
  QMB_STATUS_DIMENSION = 2,
  QMB_STATUS_GATE = 3,
  QMB_STATUS_NORMALIZATION = 4,
  QMB_STATUS_USAGE = 5,
  QMB_STATUS_CONVERGENCE = 6,
  QMB_STATUS_PARSE = 7,
  QMB_STATUS_IO = 8,
  QMB_STATUS_NULL_POINTER = 9,
  QMB_STATUS_PANIC = 10,
} QmbStatus;

typedef enum QmbEmbedding {
  QMB_EMBEDDING_ANGLE_X = 0,
  QMB_EMBEDDING_ANGLE_Y = 1,
  QMB_EMBEDDING_ANGLE_Z = 2,
  QMB_EMBEDDING_AMPLITUDE = 3,
  QMB_EMBEDDING_IQP = 4,
} QmbEmbedding;

typedef enum QmbGate {
  QMB_GATE_H = 0,
  QMB_GATE_RX = 1,
  QMB_GATE_RY = 2,
  QMB_GATE_RZ = 3,
  QMB_GATE_U3 = 4,
  QMB_GATE_CNOT = 5,
  QMB_GATE_CZ = 6,
  QMB_GATE_CRX = 7,
  QMB_GATE_CRZ = 8,
  QMB_GATE_MULTI_RZ = 9,
} QmbGate;

/**
 * Opaque QNN circuit configuration.
 */
typedef struct QmbQnn QmbQnn;

/**
 * Opaque statevector.
 */
typedef struct QmbState QmbState;

/**
 * Opaque fitted SVC.
 */
typedef struct QmbSvc QmbSvc;

typedef struct QmbMetrics {
  double accuracy;
  double precision;
  double recall;
  double f1;
} QmbMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length, or 0 when no
 * error has been recorded.
 *
 * # Safety
 * `buf` must point to `len` writable bytes, or be null when `len` is 0.
 */
size_t qmb_last_error(char *buf, size_t len);

/**
 * New `|0…0⟩` register.
 *
 * # Safety
 * `out` must be a valid pointer to a handle slot.
 */
enum QmbStatus qmb_state_new(size_t n_qubits, struct QmbState **out);

/**
 * Encode `x` (length `len`) into a new register.
 *
 * # Safety
 * `x` must point to `len` doubles; `out` must be a valid handle slot.
 */
enum QmbStatus qmb_embed(enum QmbEmbedding kind,
                         size_t iqp_repeats,
                         const double *x,
                         size_t len,
                         size_t n_qubits,
                         struct QmbState **out);

/**
 * Apply one gate. `params` holds the gate's angles, `wires` its qubits
 * (control first for controlled gates).
 *
 * # Safety
 * `state` must be a live handle; `params`/`wires` must hold the given counts.
 */
enum QmbStatus qmb_state_apply(struct QmbState *state,
                               enum QmbGate gate,
                               const double *params,
                               size_t n_params,
                               const size_t *wires,
                               size_t n_wires);

/**
 * Number of amplitudes (`2^n`) of a register, or 0 for a null handle.
 *
 * # Safety
 * `state` must be a live handle or null.
 */
size_t qmb_state_dim(const struct QmbState *state);

/**
 * Write real and imaginary parts of every amplitude.
 *
 * # Safety
 * `re` and `im` must each hold `len` doubles.
 */
enum QmbStatus qmb_state_amplitudes(const struct QmbState *state,
                                    double *re,
                                    double *im,
                                    size_t len);

/**
 * Basis-state probabilities.
 *
 * # Safety
 * `out` must hold `len` doubles.
 */
enum QmbStatus qmb_state_probabilities(const struct QmbState *state, double *out, size_t len);

/**
 * # Safety
 * `state` must be a handle from this library, or null. It is invalid afterwards.
 */
void qmb_state_free(struct QmbState *state);

/**
 * Build a QNN configuration. `ansatz` is a name such as `"u_su4"`.
 *
 * # Safety
 * `ansatz` must be a NUL-terminated string; `out` a valid handle slot.
 */
enum QmbStatus qmb_qnn_new(size_t n_qubits,
                           const char *ansatz,
                           size_t layers,
                           bool pooling,
                           enum QmbEmbedding embedding,
                           struct QmbQnn **out);

/**
 * Trainable parameter count, or 0 for a null handle.
 *
 * # Safety
 * `qnn` must be a live handle or null.
 */
size_t qmb_qnn_param_count(const struct QmbQnn *qnn);

/**
 * `P(qubit 0 = 1)` for one input.
 *
 * # Safety
 * `params` must hold `n_params` doubles, `x` `len` doubles; `out` must be valid.
 */
enum QmbStatus qmb_qnn_forward(const struct QmbQnn *qnn,
                               const double *params,
                               size_t n_params,
                               const double *x,
                               size_t len,
                               double *out);

/**
 * # Safety
 * `qnn` must be a handle from this library, or null.
 */
void qmb_qnn_free(struct QmbQnn *qnn);

/**
 * Fill `out` (`rows × rows`, row-major) with the fidelity-kernel Gram
 * matrix of `x` (`rows × cols`, row-major) for an untrained kernel.
 *
 * # Safety
 * `x` must hold `rows·cols` doubles and `out` `rows·rows` doubles.
 */
enum QmbStatus qmb_kernel_gram(size_t n_qubits,
                               size_t layers,
                               enum QmbEmbedding embedding,
                               const double *x,
                               size_t rows,
                               size_t cols,
                               double *out);

/**
 * Fit an SVC on a precomputed `m × m` Gram matrix with labels ±1.
 *
 * # Safety
 * `gram` must hold `m·m` doubles, `labels` `m` values; `out` a valid slot.
 */
enum QmbStatus qmb_svc_fit(const double *gram,
                           const int8_t *labels,
                           size_t m,
                           double c,
                           struct QmbSvc **out);

/**
 * Decision value from kernel values against the `m` training samples.
 *
 * # Safety
 * `k_row` must hold `m` doubles; `out` must be valid.
 */
enum QmbStatus qmb_svc_decision(const struct QmbSvc *svc,
                                const double *k_row,
                                size_t m,
                                double *out);

/**
 * Dual objective of the fitted model.
 *
 * # Safety
 * `svc` must be a live handle or null (returns NaN).
 */
double qmb_svc_objective(const struct QmbSvc *svc);

/**
 * # Safety
 * `svc` must be a handle from this library, or null.
 */
void qmb_svc_free(struct QmbSvc *svc);

/**
 * Accuracy, precision, recall and F1 with label 1 as positive.
 *
 * # Safety
 * `pred` and `truth` must hold `len` bytes; `out` must be valid.
 */
enum QmbStatus qmb_metrics(const uint8_t *pred,
                           const uint8_t *truth,
                           size_t len,
                           struct QmbMetrics *out);

/**
 * Run a suite file and write result tables into `out_dir`. `repeats` of 0
 * keeps each experiment's own count.
 *
 * # Safety
 * `suite_path` and `out_dir` must be NUL-terminated strings.
 */
enum QmbStatus qmb_run_suite(const char *suite_path,
                             const char *out_dir,
                             uint64_t seed,
                             size_t repeats,
                             size_t parallel);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QMLBENCH_H */
