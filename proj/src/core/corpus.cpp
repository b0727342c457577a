#include "core/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"
#include "core/prng.hpp"
#include "core/textutil.hpp"

namespace biasaudit {

using nlohmann::json;

const std::vector<std::string>& default_sectors() {
    static const std::vector<std::string> kSectors = {
        sectors::ai_ml,          sectors::ux_ui, sectors::administration,
        sectors::law,            sectors::project_management,
        sectors::sales_marketing,
    };
    return kSectors;
}

bool is_technical_sector(const std::string& sector) {
    return sector == sectors::ai_ml || sector == sectors::ux_ui;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(errc::io, "cannot open file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------
// ingest

CvRecord ingest_cv(const std::string& source_text, const std::string& id,
                   const ScreeningLimits& limits) {
    if (trim(source_text).empty()) fail(errc::empty_input, "cv '" + id + "': empty input");

    const std::string lowered = to_lower_ascii(source_text);
    for (const auto& pattern : limits.injection_patterns) {
        if (pattern.empty()) continue;
        size_t pos = lowered.find(to_lower_ascii(pattern));
        if (pos != std::string::npos) {
            fail(errc::injection_suspected,
                 "cv '" + id + "': suspicious pattern \"" + pattern + "\" at byte " +
                     std::to_string(pos) + "..." + std::to_string(pos + pattern.size()));
        }
    }

    CvRecord cv;
    cv.id = id;
    cv.raw_text = source_text;
    cv.token_count = approx_token_count(source_text, limits.chars_per_token);
    if (cv.token_count > limits.max_tokens) {
        fail(errc::token_limit_exceeded,
             "cv '" + id + "': " + std::to_string(cv.token_count) + " tokens exceeds limit " +
                 std::to_string(limits.max_tokens));
    }
    return cv;
}

// ---------------------------------------------------------------------------
// classification

void SectorLexicon::validate() const {
    if (entries.empty()) fail(errc::config, "lexicon declares no sectors");
    for (const auto& [sector, keywords] : entries) {
        if (keywords.empty()) fail(errc::config, "lexicon sector '" + sector + "' has no keywords");
        for (const auto& kw : keywords) {
            if (kw.keyword.empty()) fail(errc::config, "empty keyword in sector '" + sector + "'");
            if (kw.weight <= 0.0) {
                fail(errc::config, "non-positive weight for keyword '" + kw.keyword + "'");
            }
        }
    }
    for (const auto& [id, sector] : manual_overrides) {
        if (!has_sector(sector)) {
            fail(errc::config, "override for '" + id + "' names unknown sector '" + sector + "'");
        }
    }
}

bool SectorLexicon::has_sector(const std::string& s) const {
    for (const auto& [sector, _] : entries) {
        if (sector == s) return true;
    }
    return false;
}

SectorLexicon load_lexicon(const std::filesystem::path& lexicon_path,
                           const std::optional<std::filesystem::path>& overrides_path) {
    // ordered_json keeps the file's sector order, which defines tie-breaks
    nlohmann::ordered_json doc;
    try {
        doc = nlohmann::ordered_json::parse(read_text_file(lexicon_path));
    } catch (const nlohmann::json::exception& e) {
        fail(errc::config, "lexicon parse error: " + std::string(e.what()));
    }
    if (!doc.is_object()) fail(errc::config, "lexicon must be a JSON object");

    SectorLexicon lex;
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        std::vector<SectorKeyword> kws;
        for (const auto& entry : it.value()) {
            kws.push_back({entry.at("keyword").get<std::string>(), entry.value("weight", 1.0)});
        }
        lex.entries.emplace_back(it.key(), std::move(kws));
    }
    if (overrides_path) {
        json ov;
        try {
            ov = json::parse(read_text_file(*overrides_path));
        } catch (const nlohmann::json::exception& e) {
            fail(errc::config, "overrides parse error: " + std::string(e.what()));
        }
        for (auto it = ov.begin(); it != ov.end(); ++it) {
            lex.manual_overrides[it.key()] = it.value().get<std::string>();
        }
    }
    lex.validate();
    return lex;
}

namespace {

size_t count_phrase(const std::vector<std::string>& tokens, const std::vector<std::string>& phrase) {
    if (phrase.empty() || phrase.size() > tokens.size()) return 0;
    size_t count = 0;
    for (size_t i = 0; i + phrase.size() <= tokens.size(); ++i) {
        bool match = true;
        for (size_t k = 0; k < phrase.size(); ++k) {
            if (tokens[i + k] != phrase[k]) {
                match = false;
                break;
            }
        }
        if (match) ++count;
    }
    return count;
}

} // namespace

ClassificationResult classify_sector(const CvRecord& cv, const SectorLexicon& lexicon) {
    lexicon.validate();

    ClassificationResult result;
    const auto tokens = word_tokens(cv.raw_text);

    double best = 0.0;
    std::string best_sector = sectors::unclassified;
    for (const auto& [sector, keywords] : lexicon.entries) {
        double score = 0.0;
        for (const auto& kw : keywords) {
            score += kw.weight * double(count_phrase(tokens, word_tokens(kw.keyword)));
        }
        result.scores.emplace_back(sector, score);
        if (score > best) { // strict: earlier declaration wins ties
            best = score;
            best_sector = sector;
        }
    }

    auto ov = lexicon.manual_overrides.find(cv.id);
    result.sector = ov != lexicon.manual_overrides.end() ? ov->second : best_sector;
    return result;
}

// ---------------------------------------------------------------------------
// sampling

namespace {

std::vector<std::string> draw_without_replacement(std::vector<std::string> pool, size_t n,
                                                  uint64_t seed, uint64_t stream) {
    // partial Fisher-Yates with counter-based draws; independent of platform
    for (size_t i = 0; i < n; ++i) {
        uint64_t r = counter_hash(seed, {stream, uint64_t(i)});
        size_t j = i + size_t(bounded(r, uint64_t(pool.size() - i)));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(n);
    return pool;
}

} // namespace

ExperimentSample sample_experiment(const std::vector<CvRecord>& corpus, size_t n_tech,
                                   size_t n_nontech, uint64_t seed) {
    std::vector<std::string> tech, nontech;
    for (const auto& cv : corpus) {
        (cv.technical() ? tech : nontech).push_back(cv.id);
    }
    if (tech.size() < n_tech) {
        fail(errc::insufficient_corpus, "technical track has " + std::to_string(tech.size()) +
                                            " records, need " + std::to_string(n_tech));
    }
    if (nontech.size() < n_nontech) {
        fail(errc::insufficient_corpus, "non-technical track has " + std::to_string(nontech.size()) +
                                            " records, need " + std::to_string(n_nontech));
    }

    ExperimentSample sample;
    sample.seed = seed;
    sample.technical_ids = draw_without_replacement(std::move(tech), n_tech, seed, 0);
    sample.nontechnical_ids = draw_without_replacement(std::move(nontech), n_nontech, seed, 1);
    return sample;
}

// ---------------------------------------------------------------------------
// job descriptions

std::string JobDescription::to_prompt_text() const {
    std::ostringstream out;
    out << "Job title: " << title << "\n";
    out << "Employment type: " << employment_type << "\n";
    out << "Position description: " << position_description << "\n";
    auto list = [&](const char* label, const std::vector<std::string>& items) {
        out << label << ":\n";
        for (const auto& item : items) out << "- " << item << "\n";
    };
    list("Key Responsibilities", key_responsibilities);
    list("Qualifications", qualifications);
    list("Experiences", experiences);
    list("Skills", skills);
    return out.str();
}

json JobDescription::to_json() const {
    return {{"sector", sector},
            {"title", title},
            {"employment_type", employment_type},
            {"position_description", position_description},
            {"key_responsibilities", key_responsibilities},
            {"qualifications", qualifications},
            {"experiences", experiences},
            {"skills", skills}};
}

JobDescription JobDescription::from_json(const json& j) {
    JobDescription jd;
    try {
        jd.sector = j.at("sector").get<std::string>();
        jd.title = j.at("title").get<std::string>();
        jd.employment_type = j.value("employment_type", std::string("Full time"));
        jd.position_description = j.at("position_description").get<std::string>();
        jd.key_responsibilities = j.at("key_responsibilities").get<std::vector<std::string>>();
        jd.qualifications = j.at("qualifications").get<std::vector<std::string>>();
        jd.experiences = j.at("experiences").get<std::vector<std::string>>();
        jd.skills = j.at("skills").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        fail(errc::config, "job description parse error: " + std::string(e.what()));
    }
    auto require = [&](bool ok, const char* field) {
        if (!ok) fail(errc::config, "job description for '" + jd.sector + "': " + field + " is empty");
    };
    require(!jd.sector.empty(), "sector");
    require(!trim(jd.title).empty(), "title");
    require(!trim(jd.employment_type).empty(), "employment_type");
    require(!trim(jd.position_description).empty(), "position_description");
    require(!jd.key_responsibilities.empty(), "key_responsibilities");
    require(!jd.qualifications.empty(), "qualifications");
    require(!jd.experiences.empty(), "experiences");
    require(!jd.skills.empty(), "skills");
    return jd;
}

std::map<std::string, JobDescription> load_job_descriptions(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        fail(errc::config, "job description directory not found: " + dir.string());
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    std::map<std::string, JobDescription> jds;
    for (const auto& file : files) {
        json doc;
        try {
            doc = json::parse(read_text_file(file));
        } catch (const json::exception& e) {
            fail(errc::config, file.string() + ": " + e.what());
        }
        JobDescription jd = JobDescription::from_json(doc);
        if (jds.count(jd.sector)) {
            fail(errc::config, "duplicate job description for sector '" + jd.sector + "'");
        }
        jds.emplace(jd.sector, std::move(jd));
    }
    return jds;
}

std::vector<ManifestEntry> load_cv_manifest(const std::filesystem::path& manifest_path) {
    json doc;
    try {
        doc = json::parse(read_text_file(manifest_path));
    } catch (const json::exception& e) {
        fail(errc::config, "cv manifest parse error: " + std::string(e.what()));
    }
    if (!doc.is_array()) fail(errc::config, "cv manifest must be a JSON array");

    const auto base = manifest_path.parent_path();
    std::vector<ManifestEntry> entries;
    for (const auto& item : doc) {
        ManifestEntry e;
        e.id = item.at("id").get<std::string>();
        std::filesystem::path p = item.at("path").get<std::string>();
        e.path = p.is_absolute() ? p : base / p;
        if (item.contains("sector")) e.override_sector = item.at("sector").get<std::string>();
        if (!std::filesystem::exists(e.path)) {
            fail(errc::config, "cv file missing for '" + e.id + "': " + e.path.string());
        }
        entries.push_back(std::move(e));
    }
    return entries;
}

} // namespace biasaudit
