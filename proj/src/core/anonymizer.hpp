#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace biasaudit {

enum class PiiCategory {
    name,
    contact,
    location,
    age,
    date_of_birth,
    gender_marker,
    nationality_ethnicity,
    photo_reference,
    other_personal,
};

const char* pii_category_name(PiiCategory c);
PiiCategory pii_category_from_name(const std::string& name); // throws invalid_argument
const char* placeholder_for(PiiCategory c);                  // "[Candidate's Name]" etc.

struct PiiSpan {
    size_t start = 0; // byte offset
    size_t end = 0;   // exclusive
    PiiCategory category = PiiCategory::other_personal;
    std::string surface;

    nlohmann::json to_json() const;
    static PiiSpan from_json(const nlohmann::json& j);
};

enum class AnonMode { remove, censor };
const char* anon_mode_name(AnonMode m);

struct AnonymizationResult {
    AnonMode mode = AnonMode::censor;
    std::string original_id;
    std::string text;
    std::vector<PiiSpan> spans; // offsets into the original text
    std::vector<std::pair<PiiSpan, std::string>> placeholder_map; // censor mode only

    // Spans + mode, safe to persist next to outputs.
    nlohmann::json to_json() const;
    // (span, placeholder) pairs: contains the PII, written to the
    // access-controlled sidecar only.
    nlohmann::json placeholder_map_json() const;
};

// Deterministic rules backend: emails, phone numbers, handle-bearing URLs,
// honorific + capitalized names, labeled names/locations, age phrases,
// date-of-birth labels, nationality and gender marker words.
std::vector<PiiSpan> detect_pii(const std::string& text);

class Gateway;
enum class RunMode;

// Provider backend: asks the detector model for spans through the gateway's
// schema-constrained generation ("pii_spans" schema). Invalid offsets and
// unknown categories from the model are dropped; overlaps merge the same way
// the rules backend does. Provider/transport failures surface as
// backend_unavailable; replay misses stay fixture_miss.
std::vector<PiiSpan> detect_pii_provider(const std::string& text, Gateway& gateway,
                                         const std::string& profile_name, RunMode mode);

// Normalizes backend candidates: sorted, non-overlapping; on overlap the
// widest span wins, ties keep the earlier start, then earlier input order.
std::vector<PiiSpan> merge_spans(std::vector<PiiSpan> candidates, const std::string& text);

AnonymizationResult anonymize_remove(const std::string& text, std::vector<PiiSpan> spans,
                                     const std::string& original_id = {});

AnonymizationResult anonymize_censor(const std::string& text, std::vector<PiiSpan> spans,
                                     const std::string& original_id = {});

// Gendered third-person pronouns -> they/their forms, word-boundary and
// case-preserving. Applied only when the censor_pronouns config flag is on.
std::string neutralize_pronouns(const std::string& text);

struct LeakReport {
    size_t count = 0;
    std::vector<std::string> surfaces;
};

// Counts gold surfaces (length >= 3, non-stopword) still present verbatim in
// the anonymized text.
LeakReport verify_no_leak(const AnonymizationResult& result, const std::vector<PiiSpan>& gold);

// Inverse of censor: splices the recorded surfaces back over their
// placeholders. Byte-exact round trip for any valid censor result.
std::string reconstruct_original(const AnonymizationResult& censor_result);

} // namespace biasaudit
