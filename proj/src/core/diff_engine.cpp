#include "core/diff_engine.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "core/errors.hpp"

namespace biasaudit {

using nlohmann::json;

const char* group_key_name(GroupKey k) {
    switch (k) {
        case GroupKey::model: return "model";
        case GroupKey::mode: return "mode";
        case GroupKey::bias_type: return "bias_type";
        case GroupKey::sector: return "sector";
        case GroupKey::section: return "section";
    }
    return "model";
}

GroupKey group_key_from_name(const std::string& name) {
    static const GroupKey kAll[] = {GroupKey::model, GroupKey::mode, GroupKey::bias_type,
                                    GroupKey::sector, GroupKey::section};
    for (GroupKey k : kAll) {
        if (name == group_key_name(k)) return k;
    }
    fail(errc::invalid_argument, "unknown group key: " + name);
}

long long ScoreMatrix::total() const {
    long long t = 0;
    for (const auto& [key, value] : cells) t += value;
    return t;
}

json ScoredSection::to_json() const {
    json j = score.to_json();
    j["sector"] = sector;
    return j;
}

ScoredSection ScoredSection::from_json(const json& j) {
    ScoredSection row;
    row.score = SectionBiasScore::from_json(j);
    row.sector = j.value("sector", "");
    return row;
}

json LabeledSentence::to_json() const {
    json j = label.to_json();
    j["model"] = model;
    j["mode"] = cv_mode_name(mode);
    j["sector"] = sector;
    j["section"] = section;
    return j;
}

LabeledSentence LabeledSentence::from_json(const json& j) {
    LabeledSentence row;
    row.label = SentenceLabel::from_json(j);
    row.model = j.value("model", "");
    row.mode = cv_mode_from_name(j.value("mode", "standard"));
    row.sector = j.value("sector", "");
    row.section = j.value("section", "");
    return row;
}

// ---------------------------------------------------------------------------
// aggregation

namespace {

std::vector<std::string> key_for(const std::vector<GroupKey>& group_by, const std::string& model,
                                 CvMode mode, const std::string& bias_type, const std::string& sector,
                                 const std::string& section) {
    std::vector<std::string> key;
    key.reserve(group_by.size());
    for (GroupKey k : group_by) {
        switch (k) {
            case GroupKey::model: key.push_back(model); break;
            case GroupKey::mode: key.push_back(cv_mode_name(mode)); break;
            case GroupKey::bias_type:
                if (bias_type.empty()) {
                    fail(errc::invalid_argument,
                         "bias_type grouping requires rubric score input");
                }
                key.push_back(bias_type);
                break;
            case GroupKey::sector: key.push_back(sector); break;
            case GroupKey::section: key.push_back(section); break;
        }
    }
    return key;
}

void check_group_by(const std::vector<GroupKey>& group_by) {
    if (group_by.empty()) fail(errc::invalid_argument, "empty group-by key set");
    std::set<GroupKey> seen(group_by.begin(), group_by.end());
    if (seen.size() != group_by.size()) fail(errc::invalid_argument, "duplicate group-by key");
}

} // namespace

ScoreMatrix aggregate(const std::vector<ScoredSection>& rows, const std::vector<GroupKey>& group_by,
                      MatrixProvenance provenance) {
    check_group_by(group_by);
    ScoreMatrix m;
    m.group_keys = group_by;
    m.provenance = std::move(provenance);
    for (const auto& row : rows) {
        for (BiasType t : all_bias_types()) {
            auto key = key_for(group_by, row.score.report_ref.model, row.score.report_ref.mode,
                               bias_type_name(t), row.sector, row.score.section);
            m.cells[std::move(key)] += row.score.level(t);
        }
    }
    return m;
}

ScoreMatrix aggregate(const std::vector<LabeledSentence>& rows,
                      const std::vector<GroupKey>& group_by, MatrixProvenance provenance) {
    check_group_by(group_by);
    ScoreMatrix m;
    m.group_keys = group_by;
    m.provenance = std::move(provenance);
    for (const auto& row : rows) {
        auto key = key_for(group_by, row.model, row.mode, "", row.sector, row.section);
        auto& cell = m.cells[std::move(key)]; // touch so coverage is explicit
        if (row.label.biased) cell += 1;
    }
    return m;
}

ScoreMatrix aggregate(const std::vector<ScoreCardRow>& rows, const std::vector<GroupKey>& group_by,
                      MatrixProvenance provenance) {
    bool has_rubric = false;
    bool has_labels = false;
    for (const auto& row : rows) {
        if (std::holds_alternative<ScoredSection>(row)) {
            has_rubric = true;
        } else {
            has_labels = true;
        }
    }
    if (has_rubric && has_labels) {
        fail(errc::mixed_input_kinds, "score stream mixes rubric scores and sentence labels");
    }
    if (has_labels) {
        std::vector<LabeledSentence> labels;
        labels.reserve(rows.size());
        for (const auto& row : rows) labels.push_back(std::get<LabeledSentence>(row));
        return aggregate(labels, group_by, std::move(provenance));
    }
    std::vector<ScoredSection> scores;
    scores.reserve(rows.size());
    for (const auto& row : rows) scores.push_back(std::get<ScoredSection>(row));
    return aggregate(scores, group_by, std::move(provenance));
}

void write_score_card(const std::filesystem::path& path, const std::vector<ScoredSection>& rows) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(errc::io, "cannot write score card: " + path.string());
    for (const auto& row : rows) out << row.to_json().dump() << "\n";
}

void write_score_card(const std::filesystem::path& path, const std::vector<LabeledSentence>& rows) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(errc::io, "cannot write score card: " + path.string());
    for (const auto& row : rows) out << row.to_json().dump() << "\n";
}

std::vector<ScoreCardRow> read_score_card(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(errc::io, "cannot read score card: " + path.string());
    std::vector<ScoreCardRow> rows;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            fail(errc::io, path.string() + ":" + std::to_string(line_no) + ": invalid JSON");
        }
        if (j.contains("scores")) {
            rows.emplace_back(ScoredSection::from_json(j));
        } else {
            rows.emplace_back(LabeledSentence::from_json(j));
        }
    }
    return rows;
}

// ---------------------------------------------------------------------------
// differentials

DiffSummary compare_modes(const ScoreMatrix& standard, const ScoreMatrix& anonymized) {
    if (standard.group_keys != anonymized.group_keys) {
        fail(errc::key_mismatch, "matrices have different group keys");
    }
    if (standard.provenance.detector_id != anonymized.provenance.detector_id) {
        fail(errc::key_mismatch, "matrices come from different detectors ('" +
                                     standard.provenance.detector_id + "' vs '" +
                                     anonymized.provenance.detector_id + "')");
    }

    DiffSummary diff;
    diff.group_keys = standard.group_keys;
    diff.provenance = standard.provenance;

    std::set<std::vector<std::string>> keys;
    for (const auto& [key, _] : standard.cells) keys.insert(key);
    for (const auto& [key, _] : anonymized.cells) keys.insert(key);

    for (const auto& key : keys) {
        DiffRow row;
        row.key = key;
        auto s = standard.cells.find(key);
        auto a = anonymized.cells.find(key);
        row.std_value = s == standard.cells.end() ? 0 : s->second;
        row.ano_value = a == anonymized.cells.end() ? 0 : a->second;
        row.abs_diff = row.ano_value - row.std_value;
        if (row.std_value != 0) {
            row.pct_change = 100.0 * double(row.abs_diff) / double(row.std_value);
        }
        diff.rows.push_back(std::move(row));
    }

    diff.totals.key = {"TOTAL"};
    for (const auto& row : diff.rows) {
        diff.totals.std_value += row.std_value;
        diff.totals.ano_value += row.ano_value;
    }
    diff.totals.abs_diff = diff.totals.ano_value - diff.totals.std_value;
    if (diff.totals.std_value != 0) {
        diff.totals.pct_change =
            100.0 * double(diff.totals.abs_diff) / double(diff.totals.std_value);
    }
    return diff;
}

HeatmapData mean_matrix(const ScoreMatrix& matrix, long long denominator,
                        const std::string& mode_tag) {
    if (denominator <= 0) fail(errc::zero_denominator, "mean_matrix requires a positive denominator");
    if (matrix.group_keys.size() != 2) {
        fail(errc::invalid_argument, "mean_matrix requires a two-key matrix");
    }

    HeatmapData h;
    h.mode_tag = mode_tag;
    std::set<std::string> rows, cols;
    for (const auto& [key, _] : matrix.cells) {
        rows.insert(key[0]);
        cols.insert(key[1]);
    }
    h.row_labels.assign(rows.begin(), rows.end());
    h.col_labels.assign(cols.begin(), cols.end());

    for (const auto& r : h.row_labels) {
        std::vector<double> line;
        for (const auto& c : h.col_labels) {
            auto it = matrix.cells.find({r, c});
            long long v = it == matrix.cells.end() ? 0 : it->second;
            double mean = double(v) / double(denominator);
            // fixed 4-decimal precision, half away from zero
            line.push_back(std::round(mean * 10000.0) / 10000.0);
        }
        h.values.push_back(std::move(line));
    }
    return h;
}

std::map<std::string, std::string> recommend_composition(
    const ScoreMatrix& per_section, const std::vector<std::string>& model_order) {
    if (per_section.group_keys !=
        std::vector<GroupKey>{GroupKey::model, GroupKey::section}) {
        fail(errc::invalid_argument, "recommend_composition requires (model, section) grouping");
    }

    std::set<std::string> models, sections;
    for (const auto& [key, _] : per_section.cells) {
        models.insert(key[0]);
        sections.insert(key[1]);
    }
    if (models.empty()) fail(errc::empty_data, "no models in matrix");

    auto order_index = [&](const std::string& model) {
        for (size_t i = 0; i < model_order.size(); ++i) {
            if (model_order[i] == model) return i;
        }
        return model_order.size(); // unlisted models rank after declared ones
    };

    std::map<std::string, std::string> recommendation;
    for (const auto& section : sections) {
        const std::string* best_model = nullptr;
        long long best_value = 0;
        for (const auto& model : models) {
            auto it = per_section.cells.find({model, section});
            if (it == per_section.cells.end()) {
                fail(errc::incomplete_coverage,
                     "model '" + model + "' has no cell for section '" + section + "'");
            }
            bool better = false;
            if (!best_model) {
                better = true;
            } else if (it->second != best_value) {
                better = it->second < best_value;
            } else {
                better = order_index(model) < order_index(*best_model);
            }
            if (better) {
                best_model = &model;
                best_value = it->second;
            }
        }
        recommendation[section] = *best_model;
    }
    return recommendation;
}

} // namespace biasaudit
