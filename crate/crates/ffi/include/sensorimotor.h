#ifndef SENSORIMOTOR_H
#define SENSORIMOTOR_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SmStatus {
  SM_STATUS_OK = 0,
  SM_STATUS_NULL_POINTER = 1,
  SM_STATUS_INVALID_ARGUMENT = 2,
  SM_STATUS_INVALID_CONFIG = 3,
  SM_STATUS_PARSE = 4,
  SM_STATUS_IO = 5,
  SM_STATUS_EXPERIMENT = 6,
  SM_STATUS_REPLAY = 7,
  SM_STATUS_BUFFER_TOO_SMALL = 8,
  SM_STATUS_NOT_RUN = 9,
  SM_STATUS_PANIC = 10,
} SmStatus;

/**
 * Opaque experiment handle.
 */
typedef struct SmExperiment SmExperiment;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static name of a status code, e.g. `"SM_STATUS_PARSE"`.
 */
const char *sm_status_name(enum SmStatus status);

/**
 * Copies the calling thread's last error message into `buf` (NUL
 * terminated, truncated to `len - 1` bytes). Returns the full message
 * length in bytes, excluding the terminator.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t sm_last_error_message(char *buf, size_t len);

/**
 * One-object line world preset; `changing_env` redraws the environment
 * with probability 0.05 per scene.
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum SmStatus sm_experiment_new_sim1(uint64_t seed, bool changing_env, struct SmExperiment **out);

/**
 * Three-object square world preset.
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum SmStatus sm_experiment_new_sim2(uint64_t seed, struct SmExperiment **out);

/**
 * Parses a `key = value` config text.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be valid for writing
 * one pointer.
 */
enum SmStatus sm_experiment_from_config(const char *text, struct SmExperiment **out);

/**
 * Sets the number of scene changes. Discards earlier results.
 *
 * # Safety
 * `exp` must be a live handle or null.
 */
enum SmStatus sm_experiment_set_changes(struct SmExperiment *exp, size_t changes);

/**
 * Sets the run directory; null means results stay in memory only.
 * Discards earlier results.
 *
 * # Safety
 * `exp` must be a live handle or null; `dir` must be null or a
 * NUL-terminated string.
 */
enum SmStatus sm_experiment_set_output_dir(struct SmExperiment *exp, const char *dir);

/**
 * Runs exploration, clustering and evaluation, writing the run directory
 * when one is set.
 *
 * # Safety
 * `exp` must be a live handle or null.
 */
enum SmStatus sm_experiment_run(struct SmExperiment *exp);

/**
 * Number of catalog states `n`; C is `n x n`.
 *
 * # Safety
 * `exp` must be a live handle or null; `out` must be valid for writing.
 */
enum SmStatus sm_experiment_state_count(const struct SmExperiment *exp, size_t *out);

/**
 * Copies C row-major into `buf` (`n * n` doubles).
 *
 * # Safety
 * `exp` must be a live handle or null; `buf` must be valid for `len`
 * doubles.
 */
enum SmStatus sm_experiment_copy_probabilities(const struct SmExperiment *exp,
                                               double *buf,
                                               size_t len);

/**
 * Copies T row-major as `(row, col)` pairs into `buf` (`2 * n * n`
 * ints). Line worlds report row 0.
 *
 * # Safety
 * `exp` must be a live handle or null; `buf` must be valid for `len`
 * ints.
 */
enum SmStatus sm_experiment_copy_motor_deltas(const struct SmExperiment *exp,
                                              int32_t *buf,
                                              size_t len);

/**
 * Copies one cluster id per state into `buf` (`n` entries); -1 marks
 * states left out of clustering.
 *
 * # Safety
 * `exp` must be a live handle or null; `buf` must be valid for `len`
 * entries.
 */
enum SmStatus sm_experiment_copy_clusters(const struct SmExperiment *exp, int64_t *buf, size_t len);

/**
 * Cluster count actually used and the eigengap estimate.
 *
 * # Safety
 * `exp` must be a live handle or null; outputs must be valid for writing.
 */
enum SmStatus sm_experiment_cluster_count(const struct SmExperiment *exp,
                                          size_t *k,
                                          size_t *eigengap_k);

/**
 * Overall purity over unmixed states; NaN when there are none.
 *
 * # Safety
 * `exp` must be a live handle or null; `out` must be valid for writing.
 */
enum SmStatus sm_experiment_purity(const struct SmExperiment *exp, double *out);

/**
 * # Safety
 * `exp` must be null or a handle not yet freed.
 */
void sm_experiment_free(struct SmExperiment *exp);

/**
 * Replays `dir/events.log` against `dir/records.txt`; on success writes
 * the number of replayed scenes.
 *
 * # Safety
 * `dir` must be a NUL-terminated string; `scenes` must be null or valid
 * for writing.
 */
enum SmStatus sm_replay_dir(const char *dir, size_t *scenes);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SENSORIMOTOR_H */
