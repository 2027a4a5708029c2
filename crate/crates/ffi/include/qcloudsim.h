#ifndef QCLOUDSIM_H
#define QCLOUDSIM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result code of every fallible call.
 */
typedef enum QcsStatus {
  QCS_STATUS_OK = 0,
  QCS_STATUS_NULL_ARGUMENT = 1,
  /*
   Malformed document or missing/mistyped field.
   */
  QCS_STATUS_SYNTAX = 2,
  /*
   Document is well formed but violates a model invariant.
   */
  QCS_STATUS_SEMANTIC = 3,
  QCS_STATUS_IO = 4,
  /*
   Argument outside the domain of a formula.
   */
  QCS_STATUS_DOMAIN = 5,
  QCS_STATUS_INVALID_UTF8 = 6,
  QCS_STATUS_PANIC = 7,
  QCS_STATUS_SIMULATION = 8,
  QCS_STATUS_NOT_FOUND = 9,
} QcsStatus;

/*
 Status of one qulet in a finished run.
 */
typedef enum QcsQuletStatus {
  QCS_QULET_STATUS_PENDING = 0,
  QCS_QULET_STATUS_SUCCESS = 1,
  QCS_QULET_STATUS_FAILED = 2,
  QCS_QULET_STATUS_SKIPPED = 3,
} QcsQuletStatus;

typedef enum QcsLogLevel {
  QCS_LOG_LEVEL_EVENTS = 1,
  QCS_LOG_LEVEL_DEBUG = 2,
} QcsLogLevel;

/*
 Outcome of a simulation run.
 */
typedef struct QcsRunResult QcsRunResult;

/*
 A parsed and validated scenario.
 */
typedef struct QcsScenario QcsScenario;

/*
 Per-qulet outcome. `node_id` is -1 when the qulet was never placed.
 */
typedef struct QcsQuletOutcome {
  uint32_t qulet_id;
  enum QcsQuletStatus status;
  int64_t node_id;
  double t_n;
  double t_c;
  double t_s;
  double t_w;
  double t_q;
  double total;
  double cost;
} QcsQuletOutcome;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message describing the last failure on this thread; empty after a
 success. The pointer stays valid until the next call on this thread.
 */
const char *qcs_last_error(void);

/*
 Parses a scenario document. On success `*out` receives a new handle.
 */
enum QcsStatus qcs_scenario_parse(const char *text, struct QcsScenario **out);

/*
 Reads and parses a scenario file.
 */
enum QcsStatus qcs_scenario_load(const char *path, struct QcsScenario **out);

/*
 Releases a scenario handle. Null is ignored.
 */
void qcs_scenario_free(struct QcsScenario *scenario);

enum QcsStatus qcs_scenario_qulet_count(const struct QcsScenario *scenario, size_t *out);

/*
 Runs the scenario. When `use_seed` is true, `seed` replaces the
 scenario's seed.
 */
enum QcsStatus qcs_run(const struct QcsScenario *scenario,
                       bool use_seed,
                       uint64_t seed,
                       struct QcsRunResult **out);

/*
 Releases a run result. Null is ignored.
 */
void qcs_run_result_free(struct QcsRunResult *result);

enum QcsStatus qcs_run_makespan(const struct QcsRunResult *result, double *out);

enum QcsStatus qcs_run_qulet_count(const struct QcsRunResult *result, size_t *out);

/*
 Outcome of the qulet at position `index` (results are ordered by id).
 */
enum QcsStatus qcs_run_qulet(const struct QcsRunResult *result,
                             size_t index,
                             struct QcsQuletOutcome *out);

/*
 Event log text, one line per event. Free with [`qcs_string_free`].
 */
enum QcsStatus qcs_run_event_log(const struct QcsRunResult *result,
                                 enum QcsLogLevel level,
                                 char **out);

/*
 Results file contents (CSV with summary). Free with [`qcs_string_free`].
 */
enum QcsStatus qcs_run_results_csv(const struct QcsRunResult *result, char **out);

/*
 Releases a string returned by this library. Null is ignored.
 */
void qcs_string_free(char *text);

/*
 `2^min(depth, width)`.
 */
enum QcsStatus qcs_quantum_volume(uint32_t depth, uint32_t width, uint64_t *out);

/*
 CLOPS with the default benchmark parameters (100 templates, 10
 updates, 100 shots).
 */
enum QcsStatus qcs_clops(uint64_t quantum_volume, double time_taken, double *out);

/*
 Execution time of `depth` layers times `shots` at `clops`.
 */
enum QcsStatus qcs_quantum_time(uint64_t depth, uint64_t shots, double clops, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QCLOUDSIM_H */
