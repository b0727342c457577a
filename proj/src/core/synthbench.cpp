#include "core/synthbench.hpp"

#include <cmath>
#include <fstream>

#include "core/errors.hpp"
#include "core/prng.hpp"
#include "core/textutil.hpp"

namespace biasaudit {

using nlohmann::json;

void SynthSpec::validate() const {
    if (sectors.empty()) fail(errc::config, "synth spec needs at least one sector");
    if (pii_density < 0.0) fail(errc::config, "pii_density must be non-negative");
    if (words_per_cv == 0) fail(errc::config, "words_per_cv must be positive");
    if (sigma_factor <= 0.0) fail(errc::config, "sigma_factor must be positive");
    for (const auto& [type, rates] : injection) {
        if (rates.std_rate < 0.0 || rates.std_rate > 1.0 || rates.ano_rate < 0.0 ||
            rates.ano_rate > 1.0) {
            fail(errc::config, std::string("injection rates for ") + bias_type_name(type) +
                                   " must be in [0,1]");
        }
    }
}

json SynthSpec::to_json() const {
    json inj = json::object();
    for (const auto& [type, rates] : injection) {
        inj[bias_type_name(type)] = {{"std_rate", rates.std_rate}, {"ano_rate", rates.ano_rate}};
    }
    json j = {{"n_cvs", n_cvs},         {"sectors", sectors},
              {"pii_density", pii_density}, {"seed", seed},
              {"words_per_cv", words_per_cv}, {"injection", inj},
              {"sigma_factor", sigma_factor}};
    if (tolerance_abs) j["tolerance_abs"] = *tolerance_abs;
    return j;
}

SynthSpec SynthSpec::from_json(const json& j) {
    SynthSpec spec;
    try {
        spec.n_cvs = j.at("n_cvs").get<size_t>();
        spec.sectors = j.at("sectors").get<std::vector<std::string>>();
        spec.pii_density = j.value("pii_density", 0.0);
        spec.seed = j.value("seed", 0ull);
        spec.words_per_cv = j.value("words_per_cv", size_t(400));
        spec.sigma_factor = j.value("sigma_factor", 3.0);
        if (j.contains("tolerance_abs") && !j.at("tolerance_abs").is_null()) {
            spec.tolerance_abs = j.at("tolerance_abs").get<double>();
        }
        if (j.contains("injection")) {
            for (auto it = j.at("injection").begin(); it != j.at("injection").end(); ++it) {
                InjectionRates rates;
                rates.std_rate = it.value().value("std_rate", 0.0);
                rates.ano_rate = it.value().value("ano_rate", 0.0);
                spec.injection[bias_type_from_name(it.key())] = rates;
            }
        }
    } catch (const json::exception& e) {
        fail(errc::config, "synth spec parse error: " + std::string(e.what()));
    }
    spec.validate();
    return spec;
}

SynthSpec SynthSpec::load(const std::filesystem::path& path) {
    json doc = json::parse(read_text_file(path), nullptr, false);
    if (doc.is_discarded()) fail(errc::config, "synth spec is not valid JSON: " + path.string());
    return from_json(doc);
}

// ---------------------------------------------------------------------------
// corpus generation

namespace {

const std::vector<std::string>& first_names() {
    static const std::vector<std::string> kNames = {
        "Anong",  "Boris",  "Chalika", "Daniel", "Elena",  "Farid",  "Grace",  "Hiro",
        "Ingrid", "Jamal",  "Kanya",   "Liam",   "Mei",    "Noah",   "Olga",   "Priya",
        "Quinn",  "Rosa",   "Somchai", "Tara",   "Umar",   "Vera",   "Wichai", "Yuki",
    };
    return kNames;
}

const std::vector<std::string>& last_names() {
    static const std::vector<std::string> kNames = {
        "Anderson", "Boonmee",   "Chaiyasit", "Dubois",   "Eriksson", "Fernandez",
        "Gonzalez", "Hayashi",   "Ivanova",   "Johnson",  "Kimura",   "Larsson",
        "Mensah",   "Nakamura",  "Okafor",    "Petrov",   "Quispe",   "Rattana",
        "Suzuki",   "Tanaka",    "Umarov",    "Virtanen", "Wongsa",   "Yamada",
    };
    return kNames;
}

const std::vector<std::string>& cities() {
    static const std::vector<std::string> kCities = {
        "Bangkok", "Berlin",  "Chicago", "Dublin",  "Helsinki", "Jakarta", "Lagos",  "Lisbon",
        "Madrid",  "Nairobi", "Osaka",   "Prague",  "Seoul",    "Sydney",  "Toronto", "Warsaw",
    };
    return kCities;
}

const std::vector<std::string>& nationalities() {
    static const std::vector<std::string> kNat = {
        "Thai", "German", "Japanese", "Brazilian", "Nigerian", "Polish", "Korean", "Canadian",
    };
    return kNat;
}

const std::vector<std::string>& sector_phrases(const std::string& sector) {
    static const std::map<std::string, std::vector<std::string>> kPhrases = {
        {sectors::ai_ml,
         {"machine learning", "neural networks", "data pipelines", "model deployment"}},
        {sectors::ux_ui, {"user research", "wireframes", "usability testing", "design systems"}},
        {sectors::administration,
         {"office management", "scheduling", "records management", "clerical support"}},
        {sectors::law, {"contract review", "litigation support", "legal research", "regulatory compliance"}},
        {sectors::project_management,
         {"project planning", "agile delivery", "stakeholder management", "risk tracking"}},
        {sectors::sales_marketing,
         {"lead generation", "campaign management", "market analysis", "client relationships"}},
    };
    static const std::vector<std::string> kNeutral = {"process improvement", "team collaboration",
                                                      "quarterly reporting", "tool evaluation"};
    auto it = kPhrases.find(sector);
    return it == kPhrases.end() ? kNeutral : it->second;
}

// builder that tracks byte offsets for gold spans
struct CvBuilder {
    std::string text;
    std::vector<PiiSpan> gold;

    void append(const std::string& s) { text += s; }
    void append_pii(const std::string& s, PiiCategory category) {
        PiiSpan span;
        span.start = text.size();
        span.end = span.start + s.size();
        span.category = category;
        span.surface = s;
        text += s;
        gold.push_back(std::move(span));
    }
};

template <typename T>
const T& pick(const std::vector<T>& pool, uint64_t seed, uint64_t cv, uint64_t slot) {
    return pool[size_t(bounded(counter_hash(seed, {cv, slot}), pool.size()))];
}

} // namespace

GoldCorpus gen_corpus(const SynthSpec& spec) {
    spec.validate();

    GoldCorpus corpus;
    for (size_t ci = 0; ci < spec.n_cvs; ++ci) {
        const std::string& sector = spec.sectors[ci % spec.sectors.size()];
        const auto& phrases = sector_phrases(sector);
        const size_t pii_target =
            size_t(std::llround(spec.pii_density * double(spec.words_per_cv) / 100.0));

        CvBuilder b;
        const std::string first = pick(first_names(), spec.seed, ci, 1);
        const std::string last = pick(last_names(), spec.seed, ci, 2);
        const std::string city = pick(cities(), spec.seed, ci, 3);
        const std::string nationality = pick(nationalities(), spec.seed, ci, 4);
        const std::string email = to_lower_ascii(first) + "." + to_lower_ascii(last) +
                                  std::to_string(ci) + "@example.com";
        const unsigned age = 24 + unsigned(bounded(counter_hash(spec.seed, {ci, 5}), 40));

        size_t pii_made = 0;
        auto want_pii = [&] { return pii_made < pii_target; };

        if (want_pii()) {
            b.append("Name: ");
            b.append_pii(first + " " + last, PiiCategory::name);
            b.append("\n");
            ++pii_made;
        }
        if (want_pii()) {
            b.append("Email: ");
            b.append_pii(email, PiiCategory::contact);
            b.append("\n");
            ++pii_made;
        }
        if (want_pii()) {
            char phone[32];
            std::snprintf(phone, sizeof(phone), "+66 %03u-%04u-%03u",
                          unsigned(bounded(counter_hash(spec.seed, {ci, 6}), 900) + 100),
                          unsigned(bounded(counter_hash(spec.seed, {ci, 7}), 9000) + 1000),
                          unsigned(bounded(counter_hash(spec.seed, {ci, 8}), 900) + 100));
            b.append("Phone: ");
            b.append_pii(phone, PiiCategory::contact);
            b.append("\n");
            ++pii_made;
        }
        if (want_pii()) {
            b.append("Location: ");
            b.append_pii(city, PiiCategory::location);
            b.append("\n");
            ++pii_made;
        }
        if (want_pii()) {
            b.append("Age: ");
            b.append_pii(std::to_string(age), PiiCategory::age);
            b.append("\n");
            ++pii_made;
        }
        if (want_pii()) {
            b.append("Profile: a ");
            b.append_pii(nationality, PiiCategory::nationality_ethnicity);
            b.append(" ");
            b.append_pii(ci % 2 == 0 ? "female" : "male", PiiCategory::gender_marker);
            b.append(" professional.\n");
            pii_made += 2;
        }
        b.append("\n");

        b.append("Professional summary: specialist in " + phrases[0] + " and " + phrases[1] +
                 " with a consistent record of delivery across " + phrases[2] + ".\n\n");
        b.append("Experience highlights:\n");
        for (size_t k = 0; k < phrases.size(); ++k) {
            b.append("- Led " + phrases[k] + " initiatives and improved outcomes year over year.\n");
        }
        b.append("\n");

        // remaining PII interleaved as reference lines
        size_t extra = 0;
        while (want_pii()) {
            switch (extra % 4) {
                case 0: {
                    b.append("Reference: ");
                    const std::string rf = pick(first_names(), spec.seed, ci, 100 + extra);
                    const std::string rl = pick(last_names(), spec.seed, ci, 200 + extra);
                    b.append_pii("Dr. " + rf + " " + rl, PiiCategory::name);
                    b.append(" endorses this candidate.\n");
                    break;
                }
                case 1: {
                    b.append("Contact for portfolio: ");
                    b.append_pii("portfolio" + std::to_string(ci) + "_" + std::to_string(extra) +
                                     "@example.org",
                                 PiiCategory::contact);
                    b.append("\n");
                    break;
                }
                case 2: {
                    b.append("Previously based in ");
                    b.append_pii(pick(cities(), spec.seed, ci, 300 + extra), PiiCategory::location);
                    b.append(" for several years.\n");
                    break;
                }
                default: {
                    b.append("Earlier roles: volunteer work organized as a ");
                    b.append_pii(pick(nationalities(), spec.seed, ci, 400 + extra),
                                 PiiCategory::nationality_ethnicity);
                    b.append(" community program.\n");
                    break;
                }
            }
            ++pii_made;
            ++extra;
        }
        b.append("\n");

        // pad with neutral filler to the word target
        static const char* kFiller[] = {
            "Delivered measurable results through disciplined planning and steady execution.",
            "Collaborated with cross functional teams to ship work on schedule.",
            "Documented processes carefully so that others could build on the work.",
            "Improved quality metrics by reviewing outcomes and adjusting approach.",
        };
        size_t fi = 0;
        while (word_count(b.text) < spec.words_per_cv) {
            b.append(std::string(kFiller[fi % 4]) + "\n");
            ++fi;
        }

        char id[32];
        std::snprintf(id, sizeof(id), "synth-%04zu", ci);
        GoldCv gcv;
        gcv.cv.id = id;
        gcv.cv.raw_text = std::move(b.text);
        gcv.cv.token_count = approx_token_count(gcv.cv.raw_text);
        gcv.cv.sector = sector;
        gcv.gold = std::move(b.gold);
        corpus.cvs.push_back(std::move(gcv));
    }
    return corpus;
}

json GoldCorpus::manifest_json() const {
    json out = json::array();
    for (const auto& gcv : cvs) {
        out.push_back({{"id", gcv.cv.id}, {"path", gcv.cv.id + ".txt"}, {"sector", gcv.cv.sector}});
    }
    return out;
}

json GoldCorpus::gold_spans_json() const {
    json out = json::object();
    for (const auto& gcv : cvs) {
        json spans = json::array();
        for (const auto& span : gcv.gold) spans.push_back(span.to_json());
        out[gcv.cv.id] = spans;
    }
    return out;
}

void GoldCorpus::write_to_dir(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    for (const auto& gcv : cvs) {
        std::ofstream out(dir / (gcv.cv.id + ".txt"), std::ios::binary | std::ios::trunc);
        if (!out) fail(errc::io, "cannot write synth cv: " + (dir / gcv.cv.id).string());
        out << gcv.cv.raw_text;
    }
    std::ofstream manifest(dir / "manifest.json", std::ios::binary | std::ios::trunc);
    manifest << manifest_json().dump(2) << "\n";
    std::ofstream gold(dir / "gold_spans.json", std::ios::binary | std::ios::trunc);
    gold << gold_spans_json().dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// mock pipeline + recovery

MockScoreCards mock_pipeline(const GoldCorpus& corpus, const SynthSpec& spec) {
    MockScoreCards cards;
    const auto& section_ids = report_section_ids();
    cards.section_count = corpus.cvs.size() * section_ids.size();

    for (size_t ci = 0; ci < corpus.cvs.size(); ++ci) {
        const auto& gcv = corpus.cvs[ci];
        for (size_t si = 0; si < section_ids.size(); ++si) {
            for (int mode = 0; mode < 2; ++mode) {
                ScoredSection row;
                row.sector = gcv.cv.sector;
                row.score.report_ref.cv_id = gcv.cv.id;
                row.score.report_ref.mode = mode == 0 ? CvMode::standard : CvMode::anonymized;
                row.score.report_ref.model = "mock";
                row.score.section = section_ids[si];
                for (BiasType t : all_bias_types()) {
                    auto it = spec.injection.find(t);
                    double rate = 0.0;
                    if (it != spec.injection.end()) {
                        rate = mode == 0 ? it->second.std_rate : it->second.ano_rate;
                    }
                    double draw = unit_real(counter_hash(
                        spec.seed, {0xB1A5ull, ci, si, uint64_t(t), uint64_t(mode)}));
                    row.score.set_level(t, draw < rate ? 2 : 0);
                }
                (mode == 0 ? cards.std_rows : cards.ano_rows).push_back(std::move(row));
            }
        }
    }
    return cards;
}

RecoveryReport evaluate_recovery(const DiffSummary& diff, const SynthSpec& spec,
                                 size_t section_count) {
    if (diff.group_keys != std::vector<GroupKey>{GroupKey::bias_type}) {
        fail(errc::spec_mismatch, "recovery needs a diff grouped by bias_type");
    }
    if (section_count == 0) fail(errc::spec_mismatch, "recovery needs a positive section count");

    RecoveryReport report;
    report.section_count = section_count;
    const double n = double(section_count);

    for (BiasType t : all_bias_types()) {
        double std_rate = 0.0, ano_rate = 0.0;
        auto it = spec.injection.find(t);
        if (it != spec.injection.end()) {
            std_rate = it->second.std_rate;
            ano_rate = it->second.ano_rate;
        }

        RecoveryRow row;
        row.type = t;
        row.true_delta = (ano_rate - std_rate) * 2.0 * n;
        for (const auto& diff_row : diff.rows) {
            if (diff_row.key == std::vector<std::string>{bias_type_name(t)}) {
                row.measured_delta = double(diff_row.abs_diff);
            }
        }
        row.abs_error = std::fabs(row.measured_delta - row.true_delta);
        double variance = n * (std_rate * (1.0 - std_rate) + ano_rate * (1.0 - ano_rate));
        double sigma = 2.0 * std::sqrt(variance); // level-2 hits contribute 2 each
        row.tolerance = spec.tolerance_abs ? *spec.tolerance_abs : spec.sigma_factor * sigma;
        row.within = row.abs_error <= row.tolerance;
        if (!row.within) report.all_within = false;
        report.rows.push_back(row);
    }
    return report;
}

json RecoveryReport::to_json() const {
    json rows_j = json::array();
    for (const auto& row : rows) {
        rows_j.push_back({{"type", bias_type_name(row.type)},
                          {"true_delta", row.true_delta},
                          {"measured_delta", row.measured_delta},
                          {"abs_error", row.abs_error},
                          {"tolerance", row.tolerance},
                          {"within", row.within}});
    }
    return {{"section_count", section_count}, {"all_within", all_within}, {"rows", rows_j}};
}

} // namespace biasaudit
