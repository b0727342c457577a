#include "biasaudit.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "core/anonymizer.hpp"
#include "core/diff_engine.hpp"
#include "core/errors.hpp"
#include "core/pipeline.hpp"
#include "core/run_config.hpp"

using namespace biasaudit;

struct ba_run_config {
    RunConfig config;
};

namespace {

thread_local std::string t_last_error;

ba_status status_from_errc(errc code) {
    switch (code) {
        case errc::none: return BA_OK;
        case errc::invalid_argument: return BA_ERR_INVALID_ARGUMENT;
        case errc::config: return BA_ERR_CONFIG;
        case errc::io: return BA_ERR_IO;
        case errc::empty_input: return BA_ERR_EMPTY_INPUT;
        case errc::token_limit_exceeded: return BA_ERR_TOKEN_LIMIT_EXCEEDED;
        case errc::injection_suspected: return BA_ERR_INJECTION_SUSPECTED;
        case errc::insufficient_corpus: return BA_ERR_INSUFFICIENT_CORPUS;
        case errc::span_out_of_bounds: return BA_ERR_SPAN_OUT_OF_BOUNDS;
        case errc::backend_unavailable: return BA_ERR_BACKEND_UNAVAILABLE;
        case errc::schema_validation_exhausted: return BA_ERR_SCHEMA_VALIDATION_EXHAUSTED;
        case errc::fixture_miss: return BA_ERR_FIXTURE_MISS;
        case errc::provider: return BA_ERR_PROVIDER;
        case errc::rate_limited: return BA_ERR_RATE_LIMITED;
        case errc::endpoint: return BA_ERR_ENDPOINT;
        case errc::sector_mismatch: return BA_ERR_SECTOR_MISMATCH;
        case errc::mixed_input_kinds: return BA_ERR_MIXED_INPUT_KINDS;
        case errc::key_mismatch: return BA_ERR_KEY_MISMATCH;
        case errc::zero_denominator: return BA_ERR_ZERO_DENOMINATOR;
        case errc::incomplete_coverage: return BA_ERR_INCOMPLETE_COVERAGE;
        case errc::empty_data: return BA_ERR_EMPTY_DATA;
        case errc::spec_mismatch: return BA_ERR_SPEC_MISMATCH;
        case errc::tolerance_exceeded: return BA_ERR_TOLERANCE_EXCEEDED;
        case errc::out_of_range: return BA_ERR_OUT_OF_RANGE;
    }
    return BA_ERR_UNKNOWN;
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

// boundary: every exception becomes a status code + thread-local message
template <typename Fn>
ba_status guarded(Fn&& fn) {
    try {
        fn();
        t_last_error.clear();
        return BA_OK;
    } catch (const error& e) {
        t_last_error = e.what();
        return status_from_errc(e.code());
    } catch (const std::exception& e) {
        t_last_error = e.what();
        return BA_ERR_UNKNOWN;
    } catch (...) {
        t_last_error = "unknown failure";
        return BA_ERR_UNKNOWN;
    }
}

ba_status require(bool ok, const char* what) {
    if (ok) return BA_OK;
    t_last_error = std::string("null argument: ") + what;
    return BA_ERR_INVALID_ARGUMENT;
}

} // namespace

extern "C" {

const char* ba_status_name(ba_status status) {
    switch (status) {
        case BA_OK: return "ok";
        case BA_ERR_INVALID_ARGUMENT: return "invalid_argument";
        case BA_ERR_CONFIG: return "config";
        case BA_ERR_IO: return "io";
        case BA_ERR_EMPTY_INPUT: return "empty_input";
        case BA_ERR_TOKEN_LIMIT_EXCEEDED: return "token_limit_exceeded";
        case BA_ERR_INJECTION_SUSPECTED: return "injection_suspected";
        case BA_ERR_INSUFFICIENT_CORPUS: return "insufficient_corpus";
        case BA_ERR_SPAN_OUT_OF_BOUNDS: return "span_out_of_bounds";
        case BA_ERR_BACKEND_UNAVAILABLE: return "backend_unavailable";
        case BA_ERR_SCHEMA_VALIDATION_EXHAUSTED: return "schema_validation_exhausted";
        case BA_ERR_FIXTURE_MISS: return "fixture_miss";
        case BA_ERR_PROVIDER: return "provider";
        case BA_ERR_RATE_LIMITED: return "rate_limited";
        case BA_ERR_ENDPOINT: return "endpoint";
        case BA_ERR_SECTOR_MISMATCH: return "sector_mismatch";
        case BA_ERR_MIXED_INPUT_KINDS: return "mixed_input_kinds";
        case BA_ERR_KEY_MISMATCH: return "key_mismatch";
        case BA_ERR_ZERO_DENOMINATOR: return "zero_denominator";
        case BA_ERR_INCOMPLETE_COVERAGE: return "incomplete_coverage";
        case BA_ERR_EMPTY_DATA: return "empty_data";
        case BA_ERR_SPEC_MISMATCH: return "spec_mismatch";
        case BA_ERR_TOLERANCE_EXCEEDED: return "tolerance_exceeded";
        case BA_ERR_OUT_OF_RANGE: return "out_of_range";
        case BA_ERR_UNKNOWN: return "unknown";
    }
    return "unknown";
}

const char* ba_version(void) { return "0.1.0"; }

const char* ba_last_error(void) { return t_last_error.c_str(); }

void ba_string_free(char* s) { std::free(s); }

ba_status ba_run_config_load(const char* path, ba_run_config** out_config) {
    if (ba_status s = require(path && out_config, "path/out_config")) return s;
    return guarded([&] {
        auto* handle = new ba_run_config{RunConfig::load(path)};
        *out_config = handle;
    });
}

void ba_run_config_free(ba_run_config* config) { delete config; }

ba_status ba_run_config_set(ba_run_config* config, const char* key, const char* value) {
    if (ba_status s = require(config && key && value, "config/key/value")) return s;
    return guarded([&] {
        std::string k = key;
        if (k == "run_mode") {
            config->config.run_mode = run_mode_from_name(value);
        } else if (k == "out_dir") {
            config->config.out_dir = value;
        } else if (k == "seed") {
            config->config.seed = std::stoull(value);
        } else if (k == "anonymization") {
            std::string v = value;
            if (v == "remove") config->config.anonymization = AnonMode::remove;
            else if (v == "censor") config->config.anonymization = AnonMode::censor;
            else fail(errc::config, "anonymization must be 'remove' or 'censor'");
        } else {
            fail(errc::invalid_argument, "unknown config key: " + k);
        }
    });
}

ba_status ba_run_execute(const ba_run_config* config, char** out_manifest_path) {
    if (ba_status s = require(config != nullptr, "config")) return s;
    return guarded([&] {
        RunResult result = run_pipeline(config->config);
        if (out_manifest_path) *out_manifest_path = dup_string(result.manifest_path.string());
    });
}

ba_status ba_audit_file(const ba_run_config* config, const char* document_path,
                        char** out_rows_json) {
    if (ba_status s = require(config && document_path && out_rows_json, "config/path/out")) return s;
    return guarded([&] {
        auto rows = audit_document(config->config, document_path);
        *out_rows_json = dup_string(audit_rows_to_json(rows).dump(2));
    });
}

ba_status ba_synth_validate(const char* spec_path, const char* out_dir, char** out_report_json,
                            int* out_within_tolerance) {
    if (ba_status s = require(spec_path && out_dir, "spec_path/out_dir")) return s;
    return guarded([&] {
        SynthValidateResult result = synth_validate(spec_path, out_dir);
        if (out_report_json) *out_report_json = dup_string(result.report.to_json().dump(2));
        if (out_within_tolerance) *out_within_tolerance = result.report.all_within ? 1 : 0;
    });
}

ba_status ba_classify_file(const char* lexicon_path, const char* text_path, char** out_json) {
    if (ba_status s = require(lexicon_path && text_path && out_json, "lexicon/text/out")) return s;
    return guarded([&] {
        SectorLexicon lexicon = load_lexicon(lexicon_path);
        ScreeningLimits limits;
        limits.max_tokens = size_t(-1); // standalone classification skips the token gate
        CvRecord cv = ingest_cv(read_text_file(text_path), text_path, limits);
        auto result = classify_sector(cv, lexicon);
        nlohmann::json scores = nlohmann::json::object();
        for (const auto& [sector, score] : result.scores) scores[sector] = score;
        *out_json = dup_string(
            nlohmann::json{{"sector", result.sector}, {"scores", scores}}.dump(2));
    });
}

ba_status ba_anonymize_file(const char* text_path, const char* mode, int censor_pronouns,
                            char** out_json) {
    if (ba_status s = require(text_path && mode && out_json, "text/mode/out")) return s;
    return guarded([&] {
        std::string text = read_text_file(text_path);
        auto spans = detect_pii(text);
        std::string m = mode;
        AnonymizationResult result;
        if (m == "remove") {
            result = anonymize_remove(text, spans, text_path);
        } else if (m == "censor") {
            result = anonymize_censor(text, spans, text_path);
        } else {
            fail(errc::invalid_argument, "mode must be 'remove' or 'censor'");
        }
        if (censor_pronouns) result.text = neutralize_pronouns(result.text);
        nlohmann::json j = result.to_json();
        j["placeholder_map"] = result.placeholder_map_json();
        *out_json = dup_string(j.dump(2));
    });
}

ba_status ba_plot_csv(const char* csv_path, const char* kind, const char* out_svg_path) {
    if (ba_status s = require(csv_path && kind && out_svg_path, "csv/kind/out")) return s;
    return guarded([&] {
        ScoreMatrix matrix = read_matrix_csv(csv_path);
        std::string k = kind;
        if (k == "bar") {
            emit_plot(matrix, PlotFormat::svg, out_svg_path, "Score sums");
        } else if (k == "heatmap") {
            if (matrix.group_keys.size() != 2) {
                fail(errc::invalid_argument, "heatmap needs a two-key matrix csv");
            }
            emit_plot(mean_matrix(matrix, 1), PlotFormat::svg, out_svg_path, "Score sums");
        } else {
            fail(errc::invalid_argument, "kind must be 'bar' or 'heatmap'");
        }
    });
}

} // extern "C"
