#ifndef HYPER_TOFFOLI_H
#define HYPER_TOFFOLI_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HtStatus {
  HT_STATUS_OK = 0,
  HT_STATUS_NULL_POINTER = 1,
  HT_STATUS_INVALID_UTF8 = 2,
  HT_STATUS_CONFIG = 3,
  HT_STATUS_PHYSICS = 4,
  // A numerical invariant did not hold.
  HT_STATUS_INVARIANT = 5,
  // No amplitude survived the gate.
  HT_STATUS_ABORTED = 6,
  HT_STATUS_OUT_OF_RANGE = 7,
  HT_STATUS_IO = 8,
  HT_STATUS_PANIC = 9,
} HtStatus;

// Every outcome branch of one gate run.
typedef struct HtOutcome HtOutcome;

// A parsed scenario.
typedef struct HtScenario HtScenario;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call on the same thread.
const char *ht_last_error(void);

// Parses scenario text (the same `key = value` format the CLI reads).
//
// # Safety
// `text_ptr` must be a NUL-terminated string and `out` a writable pointer.
enum HtStatus ht_scenario_parse(const char *text_ptr, struct HtScenario **out);

// Reads and parses a scenario file.
//
// # Safety
// `path` must be a NUL-terminated string and `out` a writable pointer.
enum HtStatus ht_scenario_load(const char *path, struct HtScenario **out);

// # Safety
// `scenario` must come from `ht_scenario_parse`/`ht_scenario_load` and not
// be used afterwards. Null is ignored.
void ht_scenario_free(struct HtScenario *scenario);

// Transmission and detection efficiencies of the scenario's cavity.
//
// # Safety
// `scenario` must be a live handle; the outputs must be writable.
enum HtStatus ht_scenario_efficiencies(const struct HtScenario *scenario,
                                       double *eta_t_out,
                                       double *eta_d_out);

// Runs the scenario's gate with its measurement mode.
//
// # Safety
// `scenario` must be a live handle and `out` a writable pointer.
enum HtStatus ht_run(const struct HtScenario *scenario, struct HtOutcome **out);

// # Safety
// `outcome` must come from `ht_run` and not be used afterwards. Null is
// ignored.
void ht_outcome_free(struct HtOutcome *outcome);

// # Safety
// `outcome` must be a live handle and `count` writable.
enum HtStatus ht_outcome_branch_count(const struct HtOutcome *outcome, size_t *count);

// Probability that the photons leave the gate without a detector click or
// a loss. The same for every branch.
//
// # Safety
// `outcome` must be a live handle and `p` writable.
enum HtStatus ht_outcome_success_probability(const struct HtOutcome *outcome, double *p);

// Heralded and silently lost probability mass of the run.
//
// # Safety
// `outcome` must be a live handle; the outputs must be writable.
enum HtStatus ht_outcome_failure_mass(const struct HtOutcome *outcome,
                                      double *heralded,
                                      double *lost);

// Probability of one spin-outcome branch given success.
//
// # Safety
// `outcome` must be a live handle and `p` writable.
enum HtStatus ht_outcome_branch_probability(const struct HtOutcome *outcome,
                                            size_t index,
                                            double *p);

// Fidelity of one branch's photonic state against the ideal gate output.
//
// # Safety
// `outcome` must be a live handle and `fidelity` writable.
enum HtStatus ht_outcome_fidelity(const struct HtOutcome *outcome, size_t index, double *fidelity);

// Writes the 64 photonic amplitudes of one branch as interleaved
// `re, im` pairs into `buffer`, which must hold `len >= 128` doubles.
//
// # Safety
// `outcome` must be a live handle and `buffer` valid for `len` writes.
enum HtStatus ht_outcome_amplitudes(const struct HtOutcome *outcome,
                                    size_t index,
                                    double *buffer,
                                    size_t len);

// Repeat-until-success estimate with at most `rounds` attempts per trial.
//
// # Safety
// `scenario` must be a live handle and `estimate` writable.
enum HtStatus ht_rus_estimate(const struct HtScenario *scenario,
                              uint32_t rounds,
                              uint64_t trials,
                              double *estimate);

// Runs the scenario's coupling sweep and writes the CSV to `path`. A
// scenario without a grid sweeps its single coupling value.
//
// # Safety
// `scenario` must be a live handle and `path` a NUL-terminated string.
enum HtStatus ht_sweep_to_csv(const struct HtScenario *scenario, const char *path);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HYPER_TOFFOLI_H */
