/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef HYBRIDSAT_H
#define HYBRIDSAT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call. Values 3 to 7 match the exit
// codes of the `hybridsat` command line tool.
typedef enum HsStatus {
  HS_STATUS_OK = 0,
  // Invalid scenario or program text.
  HS_STATUS_CONFIG = 3,
  HS_STATUS_BUDGET_EXHAUSTED = 4,
  HS_STATUS_UNKNOWN_PLAN = 5,
  HS_STATUS_UNCONTROLLABLE_AXIS = 6,
  HS_STATUS_IO = 7,
  // A required pointer argument was NULL.
  HS_STATUS_NULL_ARGUMENT = 10,
  HS_STATUS_INVALID_UTF8 = 11,
  // A numeric argument was out of range or non-finite.
  HS_STATUS_INVALID_ARGUMENT = 12,
  // Two-impulse targeting has no solution for this horizon.
  HS_STATUS_SINGULAR_HORIZON = 13,
  HS_STATUS_PANIC = 99,
} HsStatus;

// Proximity verdict of [`hs_comp_distance`].
typedef enum HsProximity {
  HS_PROXIMITY_IN = 0,
  HS_PROXIMITY_OUT = 1,
} HsProximity;

// A parsed plan program.
typedef struct HsProgram HsProgram;

// A loaded scenario, ready to run.
typedef struct HsScenario HsScenario;

// The trace of a finished (or aborted) run.
typedef struct HsTrace HsTrace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or an empty string.
// The pointer stays valid until the next failing call on the thread.
const char *hs_last_error(void);

// Release a string returned by this library. NULL is ignored.
//
// # Safety
// `s` must come from this library and not be freed twice.
void hs_string_free(char *s);

// Parse plan-language source text.
//
// # Safety
// `source` must be a NUL-terminated string; `out` must be writable.
enum HsStatus hs_program_parse(const char *source, struct HsProgram **out);

// Number of plans in a program.
//
// # Safety
// `program` must be a live handle.
enum HsStatus hs_program_plan_count(const struct HsProgram *program, size_t *out);

// Canonical source text of a program; free with [`hs_string_free`].
//
// # Safety
// `program` must be a live handle; `out` must be writable.
enum HsStatus hs_program_print(const struct HsProgram *program, char **out);

// Release a program. NULL is ignored.
//
// # Safety
// `program` must come from [`hs_program_parse`] and not be freed twice.
void hs_program_free(struct HsProgram *program);

// Load a scenario file. Program paths inside it resolve relative to
// the file.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be writable.
enum HsStatus hs_scenario_load(const char *path, struct HsScenario **out);

// Override the disturbance seed.
//
// # Safety
// `scenario` must be a live handle.
enum HsStatus hs_scenario_set_seed(struct HsScenario *scenario, uint64_t seed);

// Run a scenario to completion.
//
// A trace handle is stored in `out` whenever the run started, including
// runs that stopped on a fatal error; the status reports that error.
//
// # Safety
// `scenario` must be a live handle; `out` must be writable.
enum HsStatus hs_scenario_run(const struct HsScenario *scenario, struct HsTrace **out);

// Release a scenario. NULL is ignored.
//
// # Safety
// `scenario` must come from [`hs_scenario_load`] and not be freed twice.
void hs_scenario_free(struct HsScenario *scenario);

// Number of simulated ticks in a trace.
//
// # Safety
// `trace` must be a live handle.
enum HsStatus hs_trace_tick_count(const struct HsTrace *trace, size_t *out);

// The replayable JSON-lines trace; free with [`hs_string_free`].
//
// # Safety
// `trace` must be a live handle; `out` must be writable.
enum HsStatus hs_trace_jsonl(const struct HsTrace *trace, char **out);

// The simulator CSV log; free with [`hs_string_free`].
//
// # Safety
// `trace` must be a live handle; `out` must be writable.
enum HsStatus hs_trace_sim_csv(const struct HsTrace *trace, char **out);

// Write all output files of a run into `dir`, creating it if needed.
//
// # Safety
// `trace` must be a live handle; `dir` a NUL-terminated string.
enum HsStatus hs_trace_write(const struct HsTrace *trace, const char *dir);

// Release a trace. NULL is ignored.
//
// # Safety
// `trace` must come from [`hs_scenario_run`] and not be freed twice.
void hs_trace_free(struct HsTrace *trace);

// Closed-form CW propagation of `state` by `t` seconds at mean motion
// `n` (rad/s). `out` may alias `state`.
//
// # Safety
// `state` and `out` must point to 6 doubles.
enum HsStatus hs_cw_transition(const double *state, double t, double n, double *out);

// Two-impulse transfer from `state` to the origin in `horizon` seconds.
// Writes the departure and arrival delta-v, 3 doubles each.
//
// # Safety
// `state` must point to 6 doubles; `dv1` and `dv2` to 3 each.
enum HsStatus hs_solve_two_impulse(const double *state,
                                   double horizon,
                                   double n,
                                   double *dv1,
                                   double *dv2);

// Whether `state` lies inside the deadband sphere of `radius` metres.
//
// # Safety
// `state` must point to 6 doubles; `out` must be writable.
enum HsStatus hs_comp_distance(const double *state, double radius, enum HsProximity *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HYBRIDSAT_H */
