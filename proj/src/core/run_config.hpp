#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/anonymizer.hpp"
#include "core/bias_detect.hpp"
#include "core/corpus.hpp"
#include "core/gateway.hpp"
#include "core/report_gen.hpp"

namespace biasaudit {

// One experiment run, loaded from a TOML-style config file. Paths in the
// file resolve relative to the file's directory and must exist at load.
struct RunConfig {
    // corpus
    std::filesystem::path cv_manifest;
    std::filesystem::path jd_dir;
    std::filesystem::path lexicon_path;
    std::optional<std::filesystem::path> overrides_path;
    ScreeningLimits limits;

    // generation + detection
    std::vector<ProviderProfile> providers;
    std::string detector_profile;
    std::vector<ClassifierEndpoint> classifiers;
    ReportPromptSpec prompt;

    // run parameters
    std::string run_id = "run";
    RunMode run_mode = RunMode::replay;
    AnonMode anonymization = AnonMode::censor;
    bool censor_pronouns = false;
    size_t n_tech = 20;
    size_t n_nontech = 20;
    uint64_t seed = 0;
    std::filesystem::path out_dir;
    std::filesystem::path fixture_dir;
    int max_attempts = 3;

    static RunConfig load(const std::filesystem::path& path);
    void validate() const;

    // Canonical serialization of the experiment-defining fields; the output
    // directory is deliberately excluded so reruns into fresh directories
    // hash identically.
    nlohmann::json to_json() const;
    std::string config_hash() const;
};

} // namespace biasaudit
