/* C interface to the gSQG solver and experiment harness.
 *
 * All objects are opaque handles owned by the caller and released with the
 * matching *_free function (NULL is accepted). Every fallible call returns a
 * gsqg_status; on failure a message is available from gsqg_last_error(),
 * which is thread-local and valid until the next call on the same thread. */
#ifndef GSQG_GSQG_H
#define GSQG_GSQG_H

#include <stddef.h>

#if defined(_WIN32)
#define GSQG_API __declspec(dllexport)
#else
#define GSQG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gsqg_status {
  GSQG_OK = 0,
  GSQG_INVALID_ARGUMENT = 1,
  GSQG_CONFIG = 2,    /* invalid configuration, maps to CLI exit code 2 */
  GSQG_NUMERICAL = 3, /* CFL violation or blow-up guard, maps to exit code 3 */
  GSQG_IO = 4,
  GSQG_INTERNAL = 5
} gsqg_status;

typedef enum gsqg_abort_reason {
  GSQG_ABORT_CFL = 0,
  GSQG_ABORT_NON_FINITE = 1,
  GSQG_ABORT_BLOW_UP = 2
} gsqg_abort_reason;

typedef struct gsqg_abort_info {
  gsqg_abort_reason reason;
  double t;
  long long step;
  double value;
  double limit;
} gsqg_abort_info;

typedef struct gsqg_config gsqg_config;
typedef struct gsqg_field gsqg_field;
typedef struct gsqg_series gsqg_series;
typedef struct gsqg_report gsqg_report;

GSQG_API const char* gsqg_version(void);
GSQG_API const char* gsqg_last_error(void);
GSQG_API const char* gsqg_status_name(gsqg_status status);

/* ---- configuration ---- */
GSQG_API gsqg_status gsqg_config_load(const char* path, gsqg_config** out);
GSQG_API gsqg_status gsqg_config_parse(const char* ini_text, gsqg_config** out);
/* Sweep presets: smooth-compact, counterexample, global-existence, supercritical-probe.
 * Run presets: pure-dissipation, manufactured. */
GSQG_API gsqg_status gsqg_config_preset(const char* name, gsqg_config** out);
/* Text of a preset; the pointer stays valid for the life of the process. */
GSQG_API gsqg_status gsqg_preset_text(const char* name, const char** text);
GSQG_API size_t gsqg_preset_count(void);
GSQG_API const char* gsqg_preset_name(size_t index);
/* Overrides one key, e.g. ("run", "nu", "1e-3"). */
GSQG_API gsqg_status gsqg_config_set(gsqg_config* cfg, const char* section, const char* key, const char* value);
/* Replaces the datum by "modes:...", "bump:..." or "rough:..." (see the config documentation). */
GSQG_API gsqg_status gsqg_config_set_initial(gsqg_config* cfg, const char* spec);
GSQG_API const char* gsqg_config_output_dir(const gsqg_config* cfg);
GSQG_API void gsqg_config_free(gsqg_config* cfg);

/* ---- spectral fields ---- */
/* Initial datum of the configuration on an M x M grid at the [run] viscosity. */
GSQG_API gsqg_status gsqg_field_initial(const gsqg_config* cfg, int grid_size, gsqg_field** out);
/* Reads a snapshot; ".csv" selects the text format, anything else the binary one. */
GSQG_API gsqg_status gsqg_field_read(const char* path, gsqg_field** out);
GSQG_API gsqg_status gsqg_field_write(const gsqg_field* field, const char* path);
GSQG_API int gsqg_field_grid_size(const gsqg_field* field);
GSQG_API double gsqg_field_time(const gsqg_field* field);
GSQG_API gsqg_status gsqg_field_coeff(const gsqg_field* field, int n1, int n2, double* re, double* im);
GSQG_API gsqg_status gsqg_field_sobolev_norm(const gsqg_field* field, double s, double* out);
GSQG_API void gsqg_field_free(gsqg_field* field);

/* ---- single runs ---- */
/* Integrates the [run] problem. On a numerical abort the partial series is
 * still returned through *out and the status is GSQG_NUMERICAL. */
GSQG_API gsqg_status gsqg_run(const gsqg_config* cfg, gsqg_series** out);
GSQG_API size_t gsqg_series_length(const gsqg_series* series);
/* Number of CSV columns (t, h_minus_alpha, ..., res_ham, res_l2). */
GSQG_API size_t gsqg_series_columns(void);
GSQG_API const char* gsqg_series_column_name(size_t index);
/* Copies one CSV row into values[0 .. gsqg_series_columns()). */
GSQG_API gsqg_status gsqg_series_row(const gsqg_series* series, size_t index, double* values);
/* Returns 1 and fills info when the run stopped early, 0 otherwise. */
GSQG_API int gsqg_series_abort(const gsqg_series* series, gsqg_abort_info* info);
/* Returns 1 and fills *error when [run] exact_rate is set: the largest coefficient
 * deviation from theta_0 e^{exact_rate t} over all samples. */
GSQG_API int gsqg_series_exact_error(const gsqg_series* series, double* error);
GSQG_API gsqg_status gsqg_series_final_field(const gsqg_series* series, gsqg_field** out);
/* CSV with the fixed column order; a run with T = 0 writes only the header. */
GSQG_API gsqg_status gsqg_series_write_csv(const gsqg_series* series, const char* path);
/* Writes series.csv, final.bin, final.csv and, after an abort, abort.json into dir. */
GSQG_API gsqg_status gsqg_series_write_outputs(const gsqg_series* series, const char* dir);
GSQG_API void gsqg_series_free(gsqg_series* series);

/* ---- sweeps ---- */
GSQG_API gsqg_status gsqg_sweep(const gsqg_config* cfg, gsqg_report** out);
/* JSON document; owned by the report. */
GSQG_API const char* gsqg_report_json(const gsqg_report* report);
/* Writes report.json, per-viscosity CSVs and snapshots; dir NULL uses the configured output dir. */
GSQG_API gsqg_status gsqg_report_write(const gsqg_report* report, const char* dir);
/* Number of viscosity entries carrying an abort flag. */
GSQG_API size_t gsqg_report_aborted_count(const gsqg_report* report);
GSQG_API void gsqg_report_free(gsqg_report* report);

/* ---- self test ---- */
typedef void (*gsqg_selftest_callback)(const char* suite, int passed, const char* detail, double seconds,
                                       void* user);
/* Runs every oracle suite; *failures receives the number of failing suites. */
GSQG_API gsqg_status gsqg_selftest(gsqg_selftest_callback callback, void* user, int* failures);

/* ---- export ---- */
/* Converts a snapshot between the binary and CSV layouts (chosen by extension). */
GSQG_API gsqg_status gsqg_export_snapshot(const char* in_path, const char* out_path);

#ifdef __cplusplus
}
#endif

#endif /* GSQG_GSQG_H */
