/* biasaudit - differential bias audit pipeline for LLM-generated interview
 * reports. C API over the C++ core: opaque handles, status codes, caller
 * frees returned strings with ba_string_free. All functions are
 * thread-compatible; error messages are thread-local. */

#ifndef BIASAUDIT_H
#define BIASAUDIT_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ba_status {
    BA_OK = 0,
    BA_ERR_INVALID_ARGUMENT,
    BA_ERR_CONFIG,
    BA_ERR_IO,
    BA_ERR_EMPTY_INPUT,
    BA_ERR_TOKEN_LIMIT_EXCEEDED,
    BA_ERR_INJECTION_SUSPECTED,
    BA_ERR_INSUFFICIENT_CORPUS,
    BA_ERR_SPAN_OUT_OF_BOUNDS,
    BA_ERR_BACKEND_UNAVAILABLE,
    BA_ERR_SCHEMA_VALIDATION_EXHAUSTED,
    BA_ERR_FIXTURE_MISS,
    BA_ERR_PROVIDER,
    BA_ERR_RATE_LIMITED,
    BA_ERR_ENDPOINT,
    BA_ERR_SECTOR_MISMATCH,
    BA_ERR_MIXED_INPUT_KINDS,
    BA_ERR_KEY_MISMATCH,
    BA_ERR_ZERO_DENOMINATOR,
    BA_ERR_INCOMPLETE_COVERAGE,
    BA_ERR_EMPTY_DATA,
    BA_ERR_SPEC_MISMATCH,
    BA_ERR_TOLERANCE_EXCEEDED,
    BA_ERR_OUT_OF_RANGE,
    BA_ERR_UNKNOWN
} ba_status;

/* Short stable name for a status code ("config", "fixture_miss", ...). */
const char* ba_status_name(ba_status status);

/* Library version string. */
const char* ba_version(void);

/* Message for the most recent failure on this thread; empty string if none.
 * Valid until the next failing call on the same thread. */
const char* ba_last_error(void);

/* Frees any char* returned through an out-parameter. NULL is a no-op. */
void ba_string_free(char* s);

/* ---- run configuration (opaque) ---------------------------------------- */

typedef struct ba_run_config ba_run_config;

/* Loads and validates a TOML-style run config. */
ba_status ba_run_config_load(const char* path, ba_run_config** out_config);
void ba_run_config_free(ba_run_config* config);

/* Overrides: key is one of "run_mode" (live|record|replay), "out_dir",
 * "seed" (decimal), "anonymization" (remove|censor). */
ba_status ba_run_config_set(ba_run_config* config, const char* key, const char* value);

/* ---- pipeline ----------------------------------------------------------- */

/* Executes the full run. On success *out_manifest_path names the manifest
 * JSON inside the run directory. */
ba_status ba_run_execute(const ba_run_config* config, char** out_manifest_path);

/* Audits a text document with the config's detector profile. Returns a JSON
 * array of {type, level, reasoning} rows, one per bias type. */
ba_status ba_audit_file(const ba_run_config* config, const char* document_path,
                        char** out_rows_json);

/* Synthetic differential-recovery validation. *out_within_tolerance is 1
 * when every bias type recovered within its bound. */
ba_status ba_synth_validate(const char* spec_path, const char* out_dir, char** out_report_json,
                            int* out_within_tolerance);

/* ---- standalone operations ---------------------------------------------- */

/* Sector classification of one text file against a lexicon. Returns JSON
 * {"sector":..., "scores":{...}}. */
ba_status ba_classify_file(const char* lexicon_path, const char* text_path, char** out_json);

/* Anonymizes a text file with the rules backend. mode is "remove" or
 * "censor". Returns JSON {"text":..., "spans":[...], "placeholder_map":[...]}.
 */
ba_status ba_anonymize_file(const char* text_path, const char* mode, int censor_pronouns,
                            char** out_json);

/* Renders a matrix CSV (key columns + value) to an SVG chart. kind is "bar"
 * or "heatmap". */
ba_status ba_plot_csv(const char* csv_path, const char* kind, const char* out_svg_path);

#ifdef __cplusplus
}
#endif

#endif /* BIASAUDIT_H */
