#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace biasaudit {

namespace sectors {
inline constexpr const char* ai_ml = "AI/ML";
inline constexpr const char* ux_ui = "UX/UI";
inline constexpr const char* administration = "Administration";
inline constexpr const char* law = "Law";
inline constexpr const char* project_management = "Project Management";
inline constexpr const char* sales_marketing = "Sales & Marketing";
inline constexpr const char* unclassified = "Unclassified";
} // namespace sectors

// The six canonical sectors, in declaration order.
const std::vector<std::string>& default_sectors();

// Technical track = AI/ML or UX/UI; everything else (including Unclassified)
// is non-technical.
bool is_technical_sector(const std::string& sector);

struct CvRecord {
    std::string id;
    std::string raw_text;
    size_t token_count = 0;
    std::string sector = sectors::unclassified;

    bool technical() const { return is_technical_sector(sector); }
};

struct JobDescription {
    std::string sector;
    std::string title;
    std::string employment_type = "Full time";
    std::string position_description;
    std::vector<std::string> key_responsibilities;
    std::vector<std::string> qualifications;
    std::vector<std::string> experiences;
    std::vector<std::string> skills;

    // Renders the JD as a labeled text block for prompt embedding.
    std::string to_prompt_text() const;

    nlohmann::json to_json() const;
    static JobDescription from_json(const nlohmann::json& j); // validates all fields non-empty
};

struct ScreeningLimits {
    size_t max_tokens = 8000;
    double chars_per_token = 4.0;
    std::vector<std::string> injection_patterns; // matched case-insensitively as substrings
};

struct SectorKeyword {
    std::string keyword; // lowercase token or phrase
    double weight = 1.0;
};

struct SectorLexicon {
    // declaration order is the classification tie-break order
    std::vector<std::pair<std::string, std::vector<SectorKeyword>>> entries;
    std::map<std::string, std::string> manual_overrides; // cv id -> sector

    void validate() const;
    bool has_sector(const std::string& s) const;
};

// Lexicon file: JSON object sector -> [{"keyword":..., "weight":...}], key
// order preserved. Overrides file (optional): JSON object cv id -> sector.
SectorLexicon load_lexicon(const std::filesystem::path& lexicon_path,
                           const std::optional<std::filesystem::path>& overrides_path = {});

struct ClassificationResult {
    std::string sector; // Unclassified when every score is zero
    std::vector<std::pair<std::string, double>> scores; // per sector, declaration order
};

struct ExperimentSample {
    std::vector<std::string> technical_ids;
    std::vector<std::string> nontechnical_ids;
    uint64_t seed = 0;
    // mode plan is always both-of {standard, anonymized}; kept explicit for
    // the run manifest
    std::vector<std::string> mode_plan{"standard", "anonymized"};
};

// Screens and wraps one CV text. Throws empty_input, injection_suspected
// (message carries the matched span), or token_limit_exceeded.
CvRecord ingest_cv(const std::string& source_text, const std::string& id,
                   const ScreeningLimits& limits);

// Keyword-frequency scoring: score(sector) = sum of weight * occurrences,
// case-insensitive on word boundaries, phrases as contiguous token runs.
// Manual overrides win outright; ties fall to lexicon declaration order.
ClassificationResult classify_sector(const CvRecord& cv, const SectorLexicon& lexicon);

// Deterministic stratified sample: pure function of (corpus order, sizes,
// seed). Throws insufficient_corpus naming the short track.
ExperimentSample sample_experiment(const std::vector<CvRecord>& corpus, size_t n_tech,
                                   size_t n_nontech, uint64_t seed);

struct ManifestEntry {
    std::string id;
    std::filesystem::path path;
    std::optional<std::string> override_sector;
};

// Manifest file: JSON array of {"id":..., "path":..., "sector": optional}.
// Paths resolve relative to the manifest location.
std::vector<ManifestEntry> load_cv_manifest(const std::filesystem::path& manifest_path);

// One JSON document per sector in `dir`; enforces exactly one JD per sector.
std::map<std::string, JobDescription> load_job_descriptions(const std::filesystem::path& dir);

std::string read_text_file(const std::filesystem::path& path);

} // namespace biasaudit
