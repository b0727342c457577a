#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "core/bias_detect.hpp"
#include "core/run_config.hpp"
#include "core/synthbench.hpp"
#include "core/transport.hpp"

namespace biasaudit {

struct RunResult {
    std::filesystem::path out_dir;
    std::filesystem::path manifest_path;
    std::string manifest_hash;
};

// Full pipeline: ingest -> classify -> sample -> anonymize -> generate ->
// detect -> aggregate/compare -> plot -> manifest. Writes only under
// config.out_dir (plus the fixture store in record mode). On a fatal error
// the partial artifacts stay behind next to a FAILED marker naming the
// stage, and the error is rethrown with stage attribution.
RunResult run_pipeline(const RunConfig& config, std::shared_ptr<Transport> transport = nullptr,
                       std::function<long long()> clock = nullptr);

// Generic document audit with the config's detector profile and fixtures.
std::vector<AuditRow> audit_document(const RunConfig& config, const std::filesystem::path& document,
                                     std::shared_ptr<Transport> transport = nullptr,
                                     std::function<long long()> clock = nullptr);

struct SynthValidateResult {
    RecoveryReport report;
    std::filesystem::path report_path;
};

// gen_corpus -> mock_pipeline -> aggregate -> compare_modes ->
// evaluate_recovery, with the recovery report written under out_dir.
SynthValidateResult synth_validate(const std::filesystem::path& spec_path,
                                   const std::filesystem::path& out_dir);

} // namespace biasaudit
