#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/anonymizer.hpp"
#include "core/corpus.hpp"
#include "core/diff_engine.hpp"

namespace biasaudit {

struct InjectionRates {
    double std_rate = 0.0; // probability a standard-mode section gets level-2 phrasing
    double ano_rate = 0.0;
};

struct SynthSpec {
    size_t n_cvs = 0;
    std::vector<std::string> sectors; // round-robin over CVs
    double pii_density = 0.0;         // gold spans per 100 words
    uint64_t seed = 0;
    std::map<BiasType, InjectionRates> injection; // absent types stay at 0/0
    size_t words_per_cv = 400;
    double sigma_factor = 3.0;                 // tolerance = sigma_factor * sigma
    std::optional<double> tolerance_abs;       // overrides the binomial bound when set

    void validate() const;
    nlohmann::json to_json() const;
    static SynthSpec from_json(const nlohmann::json& j);
    static SynthSpec load(const std::filesystem::path& path);
};

struct GoldCv {
    CvRecord cv;
    std::vector<PiiSpan> gold;
};

struct GoldCorpus {
    std::vector<GoldCv> cvs;

    nlohmann::json manifest_json() const;   // id -> relative path entries
    nlohmann::json gold_spans_json() const; // id -> span list sidecar
    // Writes cv text files + manifest.json + gold_spans.json.
    void write_to_dir(const std::filesystem::path& dir) const;
};

// Deterministic template-based corpus with exact gold span offsets. Realized
// PII density lands within +-10% of spec for corpora of 50+ CVs.
GoldCorpus gen_corpus(const SynthSpec& spec);

struct MockScoreCards {
    std::vector<ScoredSection> std_rows;
    std::vector<ScoredSection> ano_rows;
    size_t section_count = 0; // sections per mode
};

// Emits rubric score streams whose level-2 frequency per type follows the
// injected std/ano rates; counter-based draws keyed by (cv, section, type,
// mode), so the output is schedule-independent.
MockScoreCards mock_pipeline(const GoldCorpus& corpus, const SynthSpec& spec);

struct RecoveryRow {
    BiasType type = BiasType::gender;
    double true_delta = 0.0;
    double measured_delta = 0.0;
    double abs_error = 0.0;
    double tolerance = 0.0;
    bool within = false;
};

struct RecoveryReport {
    std::vector<RecoveryRow> rows;
    bool all_within = true;
    size_t section_count = 0;

    nlohmann::json to_json() const;
};

// Compares the measured standard-vs-anonymized deltas against the injected
// truth. Level-2 hits contribute 2 under sum-of-levels, so
//   true delta = (ano_rate - std_rate) * 2 * sections
//   sigma      = 2 * sqrt(sections * (p_std*q_std + p_ano*q_ano))
RecoveryReport evaluate_recovery(const DiffSummary& diff, const SynthSpec& spec,
                                 size_t section_count);

} // namespace biasaudit
