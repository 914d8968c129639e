#ifndef SCQSCI_H
#define SCQSCI_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ScqsciMethod {
  SCQSCI_METHOD_SC = 0,
  SCQSCI_METHOD_ORG = 1,
  SCQSCI_METHOD_SC_HCI = 2,
  SCQSCI_METHOD_ORG_DIMER_APPROACH = 3,
} ScqsciMethod;

typedef enum ScqsciStatus {
  SCQSCI_STATUS_OK = 0,
  SCQSCI_STATUS_NULL_POINTER = 1,
  // A string argument is not valid UTF-8.
  SCQSCI_STATUS_INVALID_STRING = 2,
  SCQSCI_STATUS_IO = 3,
  SCQSCI_STATUS_PARSE = 4,
  SCQSCI_STATUS_INVALID_INPUT = 5,
  SCQSCI_STATUS_NOT_CONVERGED = 6,
  // The size-consistency check was given coupled fragments.
  SCQSCI_STATUS_INTERACTING = 7,
  SCQSCI_STATUS_TOO_LARGE = 8,
  SCQSCI_STATUS_OUT_OF_RANGE = 9,
  // A Rust panic was caught at the boundary.
  SCQSCI_STATUS_PANIC = 10,
} ScqsciStatus;

typedef struct ScqsciDimer ScqsciDimer;

typedef struct ScqsciReport ScqsciReport;

typedef struct ScqsciSystem ScqsciSystem;

typedef struct ScqsciRunOptions {
  enum ScqsciMethod method;
  // Rows are reported for K = 1..k_max.
  size_t k_max;
  size_t shots;
  uint64_t seed;
  double dt;
  // HCI threshold, used by `SCQSCI_METHOD_SC_HCI` only.
  double epsilon;
  // Add a full-CI reference row.
  bool full_ci;
} ScqsciRunOptions;

typedef struct ScqsciSystemInfo {
  size_t n_orb;
  size_t n_alpha;
  size_t n_beta;
  // Hartree-Fock determinant energy, Hartree.
  double reference_energy;
} ScqsciSystemInfo;

typedef struct ScqsciEnergyRow {
  size_t k;
  double epsilon;
  double e_dimer;
  double e_a;
  double e_b;
  double e_far_dimer;
  double e_int_hartree;
  double e_int_kcal;
  size_t dim_dimer;
  size_t dim_a;
  size_t dim_b;
} ScqsciEnergyRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version, a static NUL-terminated string.
const char *scqsci_version(void);

// Message of the last failed call on this thread, or NULL after a success.
// Valid until the next call into the library on the same thread.
const char *scqsci_last_error(void);

// # Safety
// `s` must be NULL or a string returned by this library, freed once.
void scqsci_string_free(char *s);

struct ScqsciRunOptions scqsci_run_options_default(void);

// Loads an FCIDUMP file or a hydrogen geometry file.
//
// # Safety
// `path` is a NUL-terminated string; `out` points to writable storage.
enum ScqsciStatus scqsci_system_load(const char *path, struct ScqsciSystem **out);

// Builds a hydrogen cluster from geometry text (`element x y z fragment`, Å).
//
// # Safety
// `text` is a NUL-terminated string; `out` points to writable storage.
enum ScqsciStatus scqsci_system_from_geometry(const char *text, struct ScqsciSystem **out);

// # Safety
// `system` must be NULL or a handle from this library, freed once.
void scqsci_system_free(struct ScqsciSystem *system);

// # Safety
// `system` is a live handle; `out` points to writable storage.
enum ScqsciStatus scqsci_system_info(const struct ScqsciSystem *system,
                                     struct ScqsciSystemInfo *out);

// Full-CI ground-state energy in the system's own particle sector.
//
// # Safety
// `system` is a live handle; `energy` points to writable storage.
enum ScqsciStatus scqsci_system_full_ci(const struct ScqsciSystem *system, double *energy);

// Dimer from integral files. `monomer_a`, `monomer_b` and `orbital_map`
// are required for the supramolecular methods; `far_dimer` only for the
// dimer approach. Any of them may be NULL.
//
// # Safety
// String arguments are NULL or NUL-terminated; `out` points to writable storage.
enum ScqsciStatus scqsci_dimer_load(const char *dimer,
                                    const char *monomer_a,
                                    const char *monomer_b,
                                    const char *orbital_map,
                                    const char *far_dimer,
                                    struct ScqsciDimer **out);

// Two-fragment hydrogen dimer from geometry text; fragments, monomers and
// the orbital map are derived from the fragment column.
//
// # Safety
// `text` is NUL-terminated; `out` points to writable storage.
enum ScqsciStatus scqsci_dimer_from_geometry(const char *text, struct ScqsciDimer **out);

// # Safety
// `dimer` must be NULL or a handle from this library, freed once.
void scqsci_dimer_free(struct ScqsciDimer *dimer);

// Runs the configured method and returns its report.
//
// # Safety
// `dimer` is a live handle, `options` points to a valid struct and `out`
// to writable storage.
enum ScqsciStatus scqsci_run(const struct ScqsciDimer *dimer,
                             const struct ScqsciRunOptions *options,
                             struct ScqsciReport **out);

// Size-consistency check on a non-interacting dimer. Returns
// `SCQSCI_STATUS_INTERACTING` if the fragments are coupled.
//
// # Safety
// `dimer` is a live handle, `options` valid, outputs writable.
enum ScqsciStatus scqsci_check_size_consistency(const struct ScqsciDimer *dimer,
                                                const struct ScqsciRunOptions *options,
                                                double *max_abs_e_int,
                                                bool *pass);

// # Safety
// `report` must be NULL or a handle from this library, freed once.
void scqsci_report_free(struct ScqsciReport *report);

// Number of per-K (or per-threshold) rows; 0 for a NULL report.
//
// # Safety
// `report` is NULL or a live handle.
size_t scqsci_report_row_count(const struct ScqsciReport *report);

// Number of reference rows (RHF, then full-CI when requested).
//
// # Safety
// `report` is NULL or a live handle.
size_t scqsci_report_reference_count(const struct ScqsciReport *report);

// # Safety
// `report` is a live handle; `out` points to writable storage.
enum ScqsciStatus scqsci_report_row(const struct ScqsciReport *report,
                                    size_t index,
                                    struct ScqsciEnergyRow *out);

// # Safety
// `report` is a live handle; `out` points to writable storage.
enum ScqsciStatus scqsci_report_reference(const struct ScqsciReport *report,
                                          size_t index,
                                          struct ScqsciEnergyRow *out);

// Report as JSON; release with `scqsci_string_free`.
//
// # Safety
// `report` is a live handle; `out` points to writable storage.
enum ScqsciStatus scqsci_report_to_json(const struct ScqsciReport *report, char **out);

// Expected shots `1/c²` (monomer) and `1/c⁴` (dimer) for `n` normalized
// coefficients. Zero coefficients give infinity.
//
// # Safety
// `coefficients` holds `n` values; both outputs have room for `n`.
enum ScqsciStatus scqsci_shot_scaling(const double *coefficients,
                                      size_t n,
                                      double *monomer_shots,
                                      double *dimer_shots);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SCQSCI_H */
