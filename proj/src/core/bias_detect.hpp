#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/gateway.hpp"
#include "core/report_gen.hpp"

namespace biasaudit {

// The eight protected-characteristic bias types, fixed order.
enum class BiasType : int {
    gender = 0,
    racial_ethnic,
    cultural,
    socioeconomic,
    age,
    disability,
    religious,
    political,
};
inline constexpr int kBiasTypeCount = 8;

const std::array<BiasType, kBiasTypeCount>& all_bias_types();
const char* bias_type_name(BiasType t);
BiasType bias_type_from_name(const std::string& name);

// Levels: 0 = none, 1 = possible bias, 2 = bias.
bool is_valid_bias_level(int level);

struct ReportRef {
    std::string cv_id;
    CvMode mode = CvMode::standard;
    std::string model;
};

struct SectionBiasScore {
    ReportRef report_ref;
    std::string section;
    std::array<int, kBiasTypeCount> levels{}; // indexed by BiasType
    std::optional<std::array<std::string, kBiasTypeCount>> reasoning;

    int level(BiasType t) const { return levels[size_t(t)]; }
    void set_level(BiasType t, int v);

    nlohmann::json to_json() const;
    // Requires all eight types; partial score maps are rejected.
    static SectionBiasScore from_json(const nlohmann::json& j);
};

// Rubric scoring of one report section via the detector profile. The prompt
// carries the full three-level anchor table per type, so the detector
// contract is auditable offline.
SectionBiasScore score_section(const std::string& section_text, Gateway& gateway,
                               const std::string& detector_profile, bool with_reasoning,
                               RunMode mode, const ReportRef& report_ref = {},
                               const std::string& section_id = {});

struct AuditRow {
    BiasType type = BiasType::gender;
    int level = 0;
    std::string reasoning;
};

// Generic document audit: paragraph-boundary chunking under the profile
// token limit, per-type max across chunks, reasoning taken from the first
// chunk that reaches the max. Always runs with reasoning.
std::vector<AuditRow> audit_text(const std::string& document, Gateway& gateway,
                                 const std::string& detector_profile, RunMode mode);

nlohmann::json audit_rows_to_json(const std::vector<AuditRow>& rows);

// ---------------------------------------------------------------------------
// external classifier endpoints (sentence-level)

struct ClassifierEndpoint {
    std::string id;
    std::string url;
    std::string kind = "sentence_bias"; // or "distortion"
    std::map<std::string, std::string> label_map; // endpoint label -> internal label

    nlohmann::json to_json() const;
    static ClassifierEndpoint from_json(const nlohmann::json& j);
};

// POST {"inputs": [...]} -> [{"label":..., "score":...}], one entry per
// input, inference-endpoint convention. Record/replay shares the fixture
// store mechanism keyed by (endpoint id, url, inputs).
class ClassifierClient {
public:
    ClassifierClient(ClassifierEndpoint endpoint, FixtureStore& store,
                     std::shared_ptr<Transport> transport = nullptr);

    const ClassifierEndpoint& endpoint() const { return endpoint_; }

    struct RawLabel {
        std::string label;
        double confidence = 0.0;
    };
    std::vector<RawLabel> classify_batch(const std::vector<std::string>& inputs, RunMode mode);

    long long network_calls() const { return network_calls_; }

    static std::string batch_key(const ClassifierEndpoint& endpoint,
                                 const std::vector<std::string>& inputs);

private:
    ClassifierEndpoint endpoint_;
    FixtureStore& store_;
    std::shared_ptr<Transport> transport_;
    long long network_calls_ = 0;
};

struct SentenceLabel {
    std::string sentence;
    bool biased = false;
    std::string classifier_id;
    double confidence = 0.0;

    nlohmann::json to_json() const;
    static SentenceLabel from_json(const nlohmann::json& j);
};

enum class DistortionCategory : int {
    personalization = 0,
    emotional_reasoning,
    overgeneralizing,
    labeling,
    should_statements,
    catastrophizing,
    reward_fallacy,
    no_distortion,
};
const char* distortion_category_name(DistortionCategory c);
DistortionCategory distortion_category_from_name(const std::string& name);

struct DistortionLabel {
    std::string sentence;
    DistortionCategory category = DistortionCategory::no_distortion;

    nlohmann::json to_json() const;
    static DistortionLabel from_json(const nlohmann::json& j);
};

std::vector<SentenceLabel> classify_sentences(const std::string& text, ClassifierClient& client,
                                              RunMode mode);

std::vector<DistortionLabel> classify_distortions(const std::string& text, ClassifierClient& client,
                                                  RunMode mode);

} // namespace biasaudit
