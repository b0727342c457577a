#include "core/anonymizer.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <unordered_set>

#include "core/errors.hpp"
#include "core/gateway.hpp"
#include "core/textutil.hpp"

namespace biasaudit {

using nlohmann::json;

const char* pii_category_name(PiiCategory c) {
    switch (c) {
        case PiiCategory::name: return "name";
        case PiiCategory::contact: return "contact";
        case PiiCategory::location: return "location";
        case PiiCategory::age: return "age";
        case PiiCategory::date_of_birth: return "date_of_birth";
        case PiiCategory::gender_marker: return "gender_marker";
        case PiiCategory::nationality_ethnicity: return "nationality_ethnicity";
        case PiiCategory::photo_reference: return "photo_reference";
        case PiiCategory::other_personal: return "other_personal";
    }
    return "other_personal";
}

PiiCategory pii_category_from_name(const std::string& name) {
    static const std::pair<const char*, PiiCategory> kMap[] = {
        {"name", PiiCategory::name},
        {"contact", PiiCategory::contact},
        {"location", PiiCategory::location},
        {"age", PiiCategory::age},
        {"date_of_birth", PiiCategory::date_of_birth},
        {"gender_marker", PiiCategory::gender_marker},
        {"nationality_ethnicity", PiiCategory::nationality_ethnicity},
        {"photo_reference", PiiCategory::photo_reference},
        {"other_personal", PiiCategory::other_personal},
    };
    for (const auto& [n, c] : kMap) {
        if (name == n) return c;
    }
    fail(errc::invalid_argument, "unknown pii category: " + name);
}

const char* placeholder_for(PiiCategory c) {
    switch (c) {
        case PiiCategory::name: return "[Candidate's Name]";
        case PiiCategory::contact: return "[Contact Details]";
        case PiiCategory::location: return "[Location]";
        case PiiCategory::age: return "[Candidate's Age]";
        case PiiCategory::date_of_birth: return "[Date of Birth]";
        case PiiCategory::gender_marker: return "[Gender]";
        case PiiCategory::nationality_ethnicity: return "[Nationality]";
        case PiiCategory::photo_reference: return "[Photo]";
        case PiiCategory::other_personal: return "[Personal Detail]";
    }
    return "[Personal Detail]";
}

const char* anon_mode_name(AnonMode m) { return m == AnonMode::remove ? "remove" : "censor"; }

json PiiSpan::to_json() const {
    return {{"start", start}, {"end", end}, {"category", pii_category_name(category)}, {"surface", surface}};
}

PiiSpan PiiSpan::from_json(const json& j) {
    PiiSpan s;
    s.start = j.at("start").get<size_t>();
    s.end = j.at("end").get<size_t>();
    s.category = pii_category_from_name(j.at("category").get<std::string>());
    s.surface = j.value("surface", "");
    return s;
}

json AnonymizationResult::to_json() const {
    json spans_j = json::array();
    for (const auto& s : spans) spans_j.push_back(s.to_json());
    return {{"mode", anon_mode_name(mode)},
            {"original_id", original_id},
            {"text", text},
            {"spans", spans_j}};
}

json AnonymizationResult::placeholder_map_json() const {
    json out = json::array();
    for (const auto& [span, placeholder] : placeholder_map) {
        out.push_back({{"span", span.to_json()}, {"placeholder", placeholder}});
    }
    return out;
}

// ---------------------------------------------------------------------------
// rules backend

namespace {

struct Rule {
    std::regex re;
    PiiCategory category;
    int group; // submatch index to take as span, 0 = whole match
};

const std::vector<Rule>& rules() {
    using namespace std::regex_constants;
    static const std::vector<Rule> kRules = [] {
        std::vector<Rule> r;
        r.push_back({std::regex(R"([A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,})"),
                     PiiCategory::contact, 0});
        r.push_back({std::regex(
                         R"((?:https?://)?(?:www\.)?(?:linkedin\.com|github\.com|twitter\.com|x\.com|facebook\.com|instagram\.com|t\.me)/[A-Za-z0-9_.~/-]+)",
                         icase),
                     PiiCategory::contact, 0});
        r.push_back({std::regex(R"(\+?[0-9][0-9 ().-]{7,}[0-9])"), PiiCategory::contact, 0});
        r.push_back({std::regex(
                         R"(\b(?:Date of Birth|DOB|Born)\b\s*:?\s*(?:[0-9]{1,4}[ /.-][0-9A-Za-z]{1,9}[ /.-][0-9]{1,4}|[A-Z][a-z]+ [0-9]{1,2},? [0-9]{4}))",
                         icase),
                     PiiCategory::date_of_birth, 0});
        r.push_back({std::regex(R"([0-9]{1,3}[- ]years?[- ]old)", icase), PiiCategory::age, 0});
        r.push_back({std::regex(R"(Age\s*:\s*[0-9]{1,3})", icase), PiiCategory::age, 0});
        r.push_back({std::regex(R"(Name\s*:\s*([A-Z][A-Za-z.'-]*(?:[ ]+[A-Z][A-Za-z.'-]*)+))"),
                     PiiCategory::name, 1});
        r.push_back({std::regex(
                         R"((?:Mr|Mrs|Ms|Miss|Dr|Prof)\.?[ ]+[A-Z][a-z]+(?:[ ]+[A-Z][a-z]+){0,2})"),
                     PiiCategory::name, 0});
        r.push_back({std::regex(R"((?:Address|Location)\s*:\s*([^\n]+))"), PiiCategory::location, 1});
        r.push_back({std::regex(R"(Based in[ ]+([A-Z][A-Za-z]*(?:[ ]+[A-Z][A-Za-z]*)*))"),
                     PiiCategory::location, 1});
        r.push_back({std::regex(R"(Nationality\s*:\s*([^\n]+))"), PiiCategory::nationality_ethnicity, 1});
        // nationality / ethnicity marker words (capitalized forms only)
        r.push_back({std::regex(
                         R"(\b(?:Thai|American|British|Chinese|Indian|German|French|Japanese|Korean|Mexican|Brazilian|Nigerian|Egyptian|Russian|Spanish|Italian|Vietnamese|Filipino|Indonesian|Malaysian|Singaporean|Australian|Canadian|Dutch|Swedish|Polish|Turkish|Greek|Irish|Kenyan|Pakistani|Bangladeshi|Ukrainian|Portuguese|Colombian|Peruvian)\b)"),
                     PiiCategory::nationality_ethnicity, 0});
        r.push_back({std::regex(R"(Gender\s*:\s*\w+)", icase), PiiCategory::gender_marker, 0});
        r.push_back({std::regex(R"(\b(?:female|male|woman|man|women|men)\b)", icase),
                     PiiCategory::gender_marker, 0});
        r.push_back({std::regex(R"(\b(?:photograph|photo|headshot)\b)", icase),
                     PiiCategory::photo_reference, 0});
        return r;
    }();
    return kRules;
}

size_t digit_count(const std::string& s) {
    size_t n = 0;
    for (char c : s) {
        if (c >= '0' && c <= '9') ++n;
    }
    return n;
}

} // namespace

std::vector<PiiSpan> detect_pii(const std::string& text) {
    if (text.empty()) fail(errc::empty_input, "detect_pii: empty text");

    std::vector<PiiSpan> candidates;
    for (const auto& rule : rules()) {
        auto begin = std::sregex_iterator(text.begin(), text.end(), rule.re);
        for (auto it = begin; it != std::sregex_iterator(); ++it) {
            const auto& m = *it;
            size_t start = size_t(m.position(rule.group));
            size_t len = size_t(m.length(rule.group));
            if (len == 0) continue;
            std::string surface = m.str(rule.group);
            // phones need enough digits to rule out year ranges
            if (rule.category == PiiCategory::contact && surface.find('@') == std::string::npos &&
                surface.find('/') == std::string::npos && digit_count(surface) < 9) {
                continue;
            }
            candidates.push_back({start, start + len, rule.category, std::move(surface)});
        }
    }
    return merge_spans(std::move(candidates), text);
}

std::vector<PiiSpan> detect_pii_provider(const std::string& text, Gateway& gateway,
                                         const std::string& profile_name, RunMode mode) {
    if (text.empty()) fail(errc::empty_input, "detect_pii: empty text");

    GenerationRequest request;
    request.profile_name = profile_name;
    request.schema_id = "pii_spans";
    request.sections.push_back(
        {"role", "You identify personal characteristics in candidate documents."});
    request.sections.push_back(
        {"task",
         "List every span of personally identifying or personal-characteristic text in the "
         "document: names, contact details, locations, ages, dates of birth, gender markers, "
         "nationality or ethnicity markers, photo references."});
    request.sections.push_back({"data", "Document:\n```\n" + text + "\n```"});
    request.sections.push_back(
        {"output_format",
         "Respond with a single JSON object {\"spans\": [{\"start\": byte offset, \"end\": "
         "exclusive byte offset, \"category\": one of name, contact, location, age, "
         "date_of_birth, gender_marker, nationality_ethnicity, photo_reference, "
         "other_personal}]}. No text outside the JSON object."});

    nlohmann::json doc;
    try {
        doc = gateway.generate_structured(request, mode);
    } catch (const error& e) {
        if (e.code() == errc::provider || e.code() == errc::rate_limited) {
            fail(errc::backend_unavailable,
                 std::string("pii provider backend unavailable: ") + e.what());
        }
        throw;
    }

    std::vector<PiiSpan> candidates;
    for (const auto& item : doc.at("spans")) {
        PiiSpan span;
        span.start = item.at("start").get<size_t>();
        span.end = item.at("end").get<size_t>();
        try {
            span.category = pii_category_from_name(item.at("category").get<std::string>());
        } catch (const error&) {
            continue; // unknown category from the model
        }
        candidates.push_back(std::move(span));
    }
    return merge_spans(std::move(candidates), text);
}

std::vector<PiiSpan> merge_spans(std::vector<PiiSpan> candidates, const std::string& text) {
    struct Indexed {
        PiiSpan span;
        size_t order;
    };
    std::vector<Indexed> valid;
    valid.reserve(candidates.size());
    for (size_t i = 0; i < candidates.size(); ++i) {
        auto& s = candidates[i];
        if (s.start >= s.end || s.end > text.size()) continue; // junk from a backend
        valid.push_back({std::move(s), i});
    }

    // widest wins; ties keep earlier start, then earlier input order
    std::sort(valid.begin(), valid.end(), [](const Indexed& a, const Indexed& b) {
        size_t la = a.span.end - a.span.start;
        size_t lb = b.span.end - b.span.start;
        if (la != lb) return la > lb;
        if (a.span.start != b.span.start) return a.span.start < b.span.start;
        return a.order < b.order;
    });

    std::vector<PiiSpan> accepted;
    for (auto& cand : valid) {
        bool overlaps = false;
        for (const auto& acc : accepted) {
            if (cand.span.start < acc.end && acc.start < cand.span.end) {
                overlaps = true;
                break;
            }
        }
        if (!overlaps) accepted.push_back(std::move(cand.span));
    }

    std::sort(accepted.begin(), accepted.end(),
              [](const PiiSpan& a, const PiiSpan& b) { return a.start < b.start; });
    for (auto& s : accepted) s.surface = text.substr(s.start, s.end - s.start);
    return accepted;
}

// ---------------------------------------------------------------------------
// transforms

namespace {

std::vector<PiiSpan> validated_spans(const std::string& text, std::vector<PiiSpan> spans) {
    std::sort(spans.begin(), spans.end(),
              [](const PiiSpan& a, const PiiSpan& b) { return a.start < b.start; });
    size_t prev_end = 0;
    for (auto& s : spans) {
        if (s.start >= s.end || s.end > text.size()) {
            fail(errc::span_out_of_bounds, "span [" + std::to_string(s.start) + "," +
                                               std::to_string(s.end) + ") outside text of " +
                                               std::to_string(text.size()) + " bytes");
        }
        if (s.start < prev_end) {
            fail(errc::span_out_of_bounds, "overlapping spans at byte " + std::to_string(s.start));
        }
        prev_end = s.end;
        s.surface = text.substr(s.start, s.end - s.start);
    }
    return spans;
}

bool is_blank(char c) { return c == ' ' || c == '\t'; }
bool is_sep(char c) {
    return c == ',' || c == ';' || c == ':' || c == '.' || c == '!' || c == '?';
}

// Tidies one deletion site: reattaches separators that lost their word,
// drops line-leading orphans, and collapses doubled blanks.
void clean_junction(std::string& out, size_t p) {
    size_t a = p;
    while (a > 0 && is_blank(out[a - 1])) --a;
    size_t b = p;
    while (b < out.size() && is_blank(out[b])) ++b;
    bool left_edge = (a == 0 || out[a - 1] == '\n');

    if (!left_edge && b > a && b < out.size() && is_sep(out[b])) {
        out.erase(a, b - a); // "word ," -> "word,"
        return;
    }
    if (left_edge) {
        size_t e = a;
        while (e < out.size() && (is_blank(out[e]) || is_sep(out[e]))) ++e;
        out.erase(a, e - a);
        return;
    }
    bool right_edge = (b == out.size() || out[b] == '\n');
    if (right_edge) {
        out.erase(a, b - a);
    } else if (b - a > 1) {
        out.replace(a, b - a, " ");
    }
}

} // namespace

AnonymizationResult anonymize_remove(const std::string& text, std::vector<PiiSpan> spans,
                                     const std::string& original_id) {
    auto valid = validated_spans(text, std::move(spans));

    AnonymizationResult result;
    result.mode = AnonMode::remove;
    result.original_id = original_id;
    result.spans = valid;

    std::string out;
    out.reserve(text.size());
    std::vector<size_t> junctions;
    size_t cursor = 0;
    for (const auto& s : valid) {
        out.append(text, cursor, s.start - cursor);
        junctions.push_back(out.size());
        cursor = s.end;
    }
    out.append(text, cursor, text.size() - cursor);

    // right to left so earlier junction offsets stay valid
    std::sort(junctions.begin(), junctions.end(), std::greater<>());
    junctions.erase(std::unique(junctions.begin(), junctions.end()), junctions.end());
    for (size_t p : junctions) clean_junction(out, p);

    result.text = std::move(out);
    return result;
}

AnonymizationResult anonymize_censor(const std::string& text, std::vector<PiiSpan> spans,
                                     const std::string& original_id) {
    auto valid = validated_spans(text, std::move(spans));

    AnonymizationResult result;
    result.mode = AnonMode::censor;
    result.original_id = original_id;
    result.spans = valid;

    std::string out;
    out.reserve(text.size());
    size_t cursor = 0;
    for (const auto& s : valid) {
        out.append(text, cursor, s.start - cursor);
        const char* ph = placeholder_for(s.category);
        out.append(ph);
        result.placeholder_map.emplace_back(s, std::string(ph));
        cursor = s.end;
    }
    out.append(text, cursor, text.size() - cursor);
    result.text = std::move(out);
    return result;
}

std::string neutralize_pronouns(const std::string& text) {
    static const std::pair<const char*, const char*> kMap[] = {
        {"she", "they"},         {"he", "they"},          {"her", "their"},
        {"him", "them"},         {"his", "their"},        {"hers", "theirs"},
        {"herself", "themself"}, {"himself", "themself"},
    };

    std::string out;
    out.reserve(text.size());
    size_t i = 0;
    while (i < text.size()) {
        if (!is_word_char(static_cast<unsigned char>(text[i]))) {
            out.push_back(text[i]);
            ++i;
            continue;
        }
        size_t j = i;
        while (j < text.size() && is_word_char(static_cast<unsigned char>(text[j]))) ++j;
        std::string word(text.substr(i, j - i));
        std::string lower = to_lower_ascii(word);
        const char* replacement = nullptr;
        for (const auto& [from, to] : kMap) {
            if (lower == from) {
                replacement = to;
                break;
            }
        }
        if (replacement) {
            std::string rep(replacement);
            if (std::isupper(static_cast<unsigned char>(word[0]))) {
                rep[0] = char(std::toupper(static_cast<unsigned char>(rep[0])));
            }
            out.append(rep);
        } else {
            out.append(word);
        }
        i = j;
    }
    return out;
}

LeakReport verify_no_leak(const AnonymizationResult& result, const std::vector<PiiSpan>& gold) {
    static const std::unordered_set<std::string> kStopwords = {
        "the", "and", "for", "with", "from", "that", "this", "are", "was", "has",
        "have", "had", "not", "but", "all", "can", "her", "his", "she", "him",
    };

    LeakReport report;
    for (const auto& span : gold) {
        std::string surface = trim(span.surface);
        if (surface.size() < 3) continue;
        if (kStopwords.count(to_lower_ascii(surface))) continue;
        if (result.text.find(surface) != std::string::npos) {
            ++report.count;
            if (std::find(report.surfaces.begin(), report.surfaces.end(), surface) ==
                report.surfaces.end()) {
                report.surfaces.push_back(surface);
            }
        }
    }
    return report;
}

std::string reconstruct_original(const AnonymizationResult& censor_result) {
    if (censor_result.mode != AnonMode::censor) {
        fail(errc::invalid_argument, "reconstruct_original requires a censor-mode result");
    }
    // restoring earlier surfaces re-aligns later offsets with the original
    // text, so each placeholder sits exactly at its span's original start
    std::string out = censor_result.text;
    for (const auto& [span, placeholder] : censor_result.placeholder_map) {
        if (span.start + placeholder.size() > out.size() ||
            out.compare(span.start, placeholder.size(), placeholder) != 0) {
            fail(errc::invalid_argument, "placeholder map does not match censored text");
        }
        out.replace(span.start, placeholder.size(), span.surface);
    }
    return out;
}

} // namespace biasaudit
