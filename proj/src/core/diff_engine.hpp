#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "core/bias_detect.hpp"

namespace biasaudit {

enum class GroupKey { model, mode, bias_type, sector, section };
const char* group_key_name(GroupKey k);
GroupKey group_key_from_name(const std::string& name);

struct MatrixProvenance {
    std::string run_id;
    std::string detector_id;
};

// Aggregated integer sums keyed by tuples of group-key values. A cell is
// present (possibly zero) whenever a contributing row touched its key, so a
// missing tuple genuinely means "never observed".
struct ScoreMatrix {
    std::vector<GroupKey> group_keys;
    std::map<std::vector<std::string>, long long> cells;
    MatrixProvenance provenance;

    long long total() const;
};

// Rubric score with the sector context the aggregation keys need.
struct ScoredSection {
    SectionBiasScore score;
    std::string sector;

    nlohmann::json to_json() const;
    static ScoredSection from_json(const nlohmann::json& j);
};

// Sentence label with full grouping context.
struct LabeledSentence {
    SentenceLabel label;
    std::string model;
    CvMode mode = CvMode::standard;
    std::string sector;
    std::string section;

    nlohmann::json to_json() const;
    static LabeledSentence from_json(const nlohmann::json& j);
};

using ScoreCardRow = std::variant<ScoredSection, LabeledSentence>;

// Rubric rows contribute their level per bias type; sentence rows contribute
// 1 per biased label. Cell values equal a brute-force fold exactly.
ScoreMatrix aggregate(const std::vector<ScoredSection>& rows, const std::vector<GroupKey>& group_by,
                      MatrixProvenance provenance = {});
ScoreMatrix aggregate(const std::vector<LabeledSentence>& rows,
                      const std::vector<GroupKey>& group_by, MatrixProvenance provenance = {});
// Throws mixed_input_kinds when the stream mixes rubric and sentence rows.
ScoreMatrix aggregate(const std::vector<ScoreCardRow>& rows, const std::vector<GroupKey>& group_by,
                      MatrixProvenance provenance = {});

// JSONL score cards, one row per line.
void write_score_card(const std::filesystem::path& path, const std::vector<ScoredSection>& rows);
void write_score_card(const std::filesystem::path& path, const std::vector<LabeledSentence>& rows);
std::vector<ScoreCardRow> read_score_card(const std::filesystem::path& path);

struct DiffRow {
    std::vector<std::string> key;
    long long std_value = 0;
    long long ano_value = 0;
    long long abs_diff = 0;                // ano - std
    std::optional<double> pct_change;      // 100*(ano-std)/std, null when std == 0
};

struct DiffSummary {
    std::vector<GroupKey> group_keys;
    std::vector<DiffRow> rows; // sorted by key
    DiffRow totals;
    MatrixProvenance provenance;
};

// Standard-vs-anonymized differential over the union of key tuples. Both
// matrices must share group keys and detector.
DiffSummary compare_modes(const ScoreMatrix& standard, const ScoreMatrix& anonymized);

struct HeatmapData {
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
    std::vector<std::vector<double>> values; // [row][col], 4 decimal places
    std::string mode_tag;
};

// Cell / denominator at fixed 4-decimal precision; requires a two-key matrix
// (rows = first key, columns = second).
HeatmapData mean_matrix(const ScoreMatrix& matrix, long long denominator,
                        const std::string& mode_tag = {});

// Per section, the model with minimal summed bias; ties resolve to the
// earliest entry in model_order. Matrix must be grouped by (model, section)
// and every model must cover every section.
std::map<std::string, std::string> recommend_composition(const ScoreMatrix& per_section,
                                                         const std::vector<std::string>& model_order);

// ---------------------------------------------------------------------------
// plot / table emission (byte-deterministic for fixed input)

enum class PlotFormat { csv, svg };

std::filesystem::path emit_plot(const ScoreMatrix& matrix, PlotFormat format,
                                const std::filesystem::path& path, const std::string& title = {});
std::filesystem::path emit_plot(const DiffSummary& diff, PlotFormat format,
                                const std::filesystem::path& path, const std::string& title = {});
std::filesystem::path emit_plot(const HeatmapData& heatmap, PlotFormat format,
                                const std::filesystem::path& path, const std::string& title = {});

// CSV round-trip support: header row of key columns + value.
ScoreMatrix read_matrix_csv(const std::filesystem::path& path, MatrixProvenance provenance = {});

std::string matrix_to_csv(const ScoreMatrix& matrix);
std::string diff_to_csv(const DiffSummary& diff);

} // namespace biasaudit
