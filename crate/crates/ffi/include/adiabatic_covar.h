#ifndef ADIABATIC_COVAR_H
#define ADIABATIC_COVAR_H

/* Generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum AcvStatus {
  ACV_OK = 0,
  ACV_NULL_POINTER = 1,
  ACV_INVALID_UTF8 = 2,
  ACV_PARSE_ERROR = 3,
  ACV_INVALID_ARGUMENT = 4,
  ACV_RUN_ERROR = 5,
  ACV_CAPACITY_ERROR = 6,
  ACV_INDEX_OUT_OF_RANGE = 7,
  ACV_PANIC = 8,
} AcvStatus;

/**
 * Opaque Hamiltonian handle (a canonicalized weighted Pauli sum).
 */
typedef struct AcvHamiltonian AcvHamiltonian;

/**
 * Opaque trajectory handle from an adiabatic run.
 */
typedef struct AcvTrajectory AcvTrajectory;

/**
 * One trajectory row in plain C terms. `delta_e` is NaN and `level_index`
 * is -1 when the run tracked no oracle.
 */
typedef struct AcvTrajectoryRecord {
  double t;
  uint64_t step_index;
  uint64_t inner_iterations;
  double energy;
  double f_norm;
  double delta_e;
  int64_t level_index;
} AcvTrajectoryRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static string; never freed by the caller.
 */
const char *acv_version(void);

/**
 * Description of the most recent failure on this thread; never freed by the
 * caller and overwritten by the next failing call.
 */
const char *acv_last_error_message(void);

/**
 * Release a string returned through an out-pointer.
 *
 * # Safety
 * `s` must be a pointer previously handed out by this library and not yet
 * freed.
 */
void acv_string_free(char *s);

/**
 * Parse a Hamiltonian from the textual format (`<re> <im> <word>` lines).
 *
 * # Safety
 * `text` must be NUL-terminated; `out` must be a valid writable pointer.
 */
enum AcvStatus acv_hamiltonian_from_text(const char *text, struct AcvHamiltonian **out);

/**
 * Serialize a Hamiltonian back to the textual format.
 *
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
enum AcvStatus acv_hamiltonian_to_text(const struct AcvHamiltonian *h, char **out);

/**
 * Number of qubits (0 on a null handle).
 *
 * # Safety
 * `h` must be null or a live handle.
 */
uintptr_t acv_hamiltonian_num_qubits(const struct AcvHamiltonian *h);

/**
 * Number of canonicalized terms (0 on a null handle).
 *
 * # Safety
 * `h` must be null or a live handle.
 */
uintptr_t acv_hamiltonian_num_terms(const struct AcvHamiltonian *h);

/**
 * Exact ground energy via dense diagonalization (at most 14 qubits).
 *
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
enum AcvStatus acv_hamiltonian_ground_energy(const struct AcvHamiltonian *h, double *out);

/**
 * Release a Hamiltonian handle.
 *
 * # Safety
 * `h` must be null or a live handle; it must not be used afterwards.
 */
void acv_hamiltonian_free(struct AcvHamiltonian *h);

/**
 * Run the adiabatic covariance solver described by an experiment config
 * JSON (the CLI `run` schema) entirely in memory: the first seed and step
 * size are used and no files are written.
 *
 * # Safety
 * `config_json` must be NUL-terminated; `out` must be writable.
 */
enum AcvStatus acv_adiabatic_run(const char *config_json, struct AcvTrajectory **out);

/**
 * Execute a full experiment config (all seeds and step sizes, files written
 * to its output directory) and hand back the metadata report as JSON.
 *
 * # Safety
 * `config_json` must be NUL-terminated; `report_json_out` must be writable.
 */
enum AcvStatus acv_run_experiment_json(const char *config_json, char **report_json_out);

/**
 * Number of records in a trajectory (0 on a null handle).
 *
 * # Safety
 * `t` must be null or a live handle.
 */
uintptr_t acv_trajectory_num_records(const struct AcvTrajectory *t);

/**
 * Copy one trajectory row into a caller-owned struct.
 *
 * # Safety
 * `t` must be a live handle; `out` must be writable.
 */
enum AcvStatus acv_trajectory_record(const struct AcvTrajectory *t,
                                     uintptr_t index,
                                     struct AcvTrajectoryRecord *out);

/**
 * Render a trajectory as CSV (the on-disk schema).
 *
 * # Safety
 * `t` must be a live handle; `out` must be writable.
 */
enum AcvStatus acv_trajectory_to_csv(const struct AcvTrajectory *t, char **out);

/**
 * Release a trajectory handle.
 *
 * # Safety
 * `t` must be null or a live handle; it must not be used afterwards.
 */
void acv_trajectory_free(struct AcvTrajectory *t);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ADIABATIC_COVAR_H */
