#include "core/pipeline.hpp"

#include <fstream>
#include <future>
#include <map>
#include <set>

#include "core/diff_engine.hpp"
#include "core/errors.hpp"
#include "core/sha256.hpp"
#include "core/textutil.hpp"

namespace biasaudit {

using nlohmann::json;

namespace {

// Records every artifact written under the run directory so the manifest can
// pin (relative path -> content hash) for the whole run.
class ArtifactSink {
public:
    explicit ArtifactSink(std::filesystem::path root) : root_(std::move(root)) {
        std::filesystem::create_directories(root_);
    }

    const std::filesystem::path& root() const { return root_; }

    std::filesystem::path write_text(const std::string& rel, const std::string& content) {
        auto path = root_ / rel;
        std::filesystem::create_directories(path.parent_path());
        {
            std::ofstream out(path, std::ios::binary | std::ios::trunc);
            if (!out) fail(errc::io, "cannot write artifact: " + path.string());
            out << content;
        }
        hashes_[rel] = sha256_hex(content);
        return path;
    }

    std::filesystem::path write_json(const std::string& rel, const json& doc) {
        return write_text(rel, doc.dump(2) + "\n");
    }

    // for files emitted by helpers that write directly (plots)
    void record_existing(const std::string& rel) {
        hashes_[rel] = sha256_hex(read_text_file(root_ / rel));
    }

    const std::map<std::string, std::string>& hashes() const { return hashes_; }

private:
    std::filesystem::path root_;
    std::map<std::string, std::string> hashes_;
};

struct GeneratedReport {
    InterviewReport report;
    std::string sector;
};

// stage attribution wrapper; leaves a FAILED marker next to partial output
template <typename Fn>
void stage(const char* name, const std::filesystem::path& out_dir, Fn&& fn) {
    try {
        fn();
    } catch (const error& e) {
        std::ofstream marker(out_dir / "FAILED", std::ios::trunc);
        marker << "stage: " << name << "\n" << "error: " << errc_name(e.code()) << "\n"
               << e.what() << "\n";
        throw error(e.code(), std::string("stage ") + name + ": " + e.what());
    }
}

std::string sanitize_component(const std::string& s) {
    std::string out;
    for (char c : s) {
        out.push_back(is_word_char(static_cast<unsigned char>(c)) ? char(std::tolower(c)) : '-');
    }
    return out;
}

ScoreMatrix filter_first_key(const ScoreMatrix& matrix, const std::string& value) {
    ScoreMatrix out;
    out.group_keys.assign(matrix.group_keys.begin() + 1, matrix.group_keys.end());
    out.provenance = matrix.provenance;
    for (const auto& [key, cell] : matrix.cells) {
        if (key[0] == value) {
            out.cells[std::vector<std::string>(key.begin() + 1, key.end())] = cell;
        }
    }
    return out;
}

} // namespace

RunResult run_pipeline(const RunConfig& config, std::shared_ptr<Transport> transport,
                       std::function<long long()> clock) {
    config.validate();
    ArtifactSink sink(config.out_dir);
    std::filesystem::remove(config.out_dir / "FAILED");

    // shared state across stages
    SectorLexicon lexicon;
    std::map<std::string, JobDescription> jds;
    std::vector<CvRecord> cvs;
    std::vector<ManifestEntry> manifest_entries;
    ExperimentSample sample;
    std::map<std::string, const CvRecord*> by_id;
    std::map<std::string, AnonymizationResult> anonymized;
    // reports keyed (provider index, cv index in sample order, mode)
    std::vector<GeneratedReport> reports;

    GatewayConfig gw_config;
    gw_config.fixture_dir = config.fixture_dir;
    gw_config.max_attempts = config.max_attempts;
    gw_config.clock = std::move(clock);
    Gateway gateway(config.providers, gw_config, transport);
    FixtureStore classifier_store(config.fixture_dir);

    stage("ingest", sink.root(), [&] {
        lexicon = load_lexicon(config.lexicon_path, config.overrides_path);
        jds = load_job_descriptions(config.jd_dir);
        manifest_entries = load_cv_manifest(config.cv_manifest);
        for (const auto& entry : manifest_entries) {
            cvs.push_back(ingest_cv(read_text_file(entry.path), entry.id, config.limits));
        }
    });

    stage("classify", sink.root(), [&] {
        json classification = json::object();
        for (size_t i = 0; i < cvs.size(); ++i) {
            auto result = classify_sector(cvs[i], lexicon);
            cvs[i].sector = manifest_entries[i].override_sector.value_or(result.sector);
            json scores = json::object();
            for (const auto& [sector, score] : result.scores) scores[sector] = score;
            classification[cvs[i].id] = {{"sector", cvs[i].sector}, {"scores", scores}};
        }
        sink.write_json("classification.json", classification);
        for (const auto& cv : cvs) by_id[cv.id] = &cv;
    });

    stage("sample", sink.root(), [&] {
        sample = sample_experiment(cvs, config.n_tech, config.n_nontech, config.seed);
        sink.write_json("sample.json", {{"seed", sample.seed},
                                        {"technical_ids", sample.technical_ids},
                                        {"nontechnical_ids", sample.nontechnical_ids},
                                        {"mode_plan", sample.mode_plan}});
    });

    std::vector<std::string> sampled_ids = sample.technical_ids;
    sampled_ids.insert(sampled_ids.end(), sample.nontechnical_ids.begin(),
                       sample.nontechnical_ids.end());

    stage("anonymize", sink.root(), [&] {
        for (const auto& id : sampled_ids) {
            const CvRecord& cv = *by_id.at(id);
            auto spans = detect_pii(cv.raw_text);
            AnonymizationResult result = config.anonymization == AnonMode::remove
                                             ? anonymize_remove(cv.raw_text, spans, cv.id)
                                             : anonymize_censor(cv.raw_text, spans, cv.id);
            if (config.censor_pronouns) result.text = neutralize_pronouns(result.text);

            const std::string stem = sanitize_component(cv.id);
            sink.write_text("anonymized/" + stem + ".txt", result.text);
            sink.write_json("anonymized/" + stem + "_spans.json", result.to_json());
            if (result.mode == AnonMode::censor) {
                // contains the original PII: separate access-controlled file
                auto path = sink.write_json("anonymized/private/" + stem + "_placeholders.json",
                                            result.placeholder_map_json());
                std::filesystem::permissions(
                    path, std::filesystem::perms::owner_read | std::filesystem::perms::owner_write,
                    std::filesystem::perm_options::replace);
            }
            anonymized.emplace(cv.id, std::move(result));
        }
    });

    stage("generate", sink.root(), [&] {
        struct Task {
            ReportInput input;
            const JobDescription* jd;
            std::string profile;
        };
        std::vector<Task> tasks;
        for (const auto& provider : config.providers) {
            for (const auto& id : sampled_ids) {
                const CvRecord& cv = *by_id.at(id);
                auto jd_it = jds.find(cv.sector);
                if (jd_it == jds.end()) {
                    fail(errc::sector_mismatch,
                         "no job description for sampled sector '" + cv.sector + "' (cv '" + id +
                             "')");
                }
                for (CvMode mode : {CvMode::standard, CvMode::anonymized}) {
                    ReportInput input;
                    input.cv_id = cv.id;
                    input.sector = cv.sector;
                    input.mode = mode;
                    input.text =
                        mode == CvMode::standard ? cv.raw_text : anonymized.at(cv.id).text;
                    tasks.push_back({std::move(input), &jd_it->second, provider.name});
                }
            }
        }

        // per-report parallelism; the gateway's per-provider bound gates it
        std::vector<std::future<GeneratedReport>> futures;
        futures.reserve(tasks.size());
        for (const auto& task : tasks) {
            futures.push_back(std::async(std::launch::async, [&task, &gateway, &config] {
                GeneratedReport gr;
                gr.report = generate_report(task.input, *task.jd, gateway, task.profile,
                                            config.run_mode, config.prompt);
                gr.sector = task.input.sector;
                return gr;
            }));
        }
        for (auto& f : futures) reports.push_back(f.get());

        for (const auto& gr : reports) {
            std::string stem = report_file_stem(gr.report.cv_id, gr.report.mode, gr.report.model);
            sink.write_json("reports/" + stem + ".json", gr.report.to_json());
        }
    });

    std::vector<ScoredSection> rubric_std, rubric_ano;
    std::map<std::string, std::vector<LabeledSentence>> sentences_std, sentences_ano;

    stage("detect", sink.root(), [&] {
        for (const auto& gr : reports) {
            auto& bucket = gr.report.mode == CvMode::standard ? rubric_std : rubric_ano;
            for (const auto& [section_id, text] : gr.report.sections()) {
                ScoredSection row;
                row.score = score_section(
                    text, gateway, config.detector_profile, /*with_reasoning=*/false,
                    config.run_mode,
                    ReportRef{gr.report.cv_id, gr.report.mode, gr.report.model}, section_id);
                row.sector = gr.sector;
                bucket.push_back(std::move(row));
            }
        }
        write_score_card(sink.root() / "scores/rubric_standard.jsonl", rubric_std);
        sink.record_existing("scores/rubric_standard.jsonl");
        write_score_card(sink.root() / "scores/rubric_anonymized.jsonl", rubric_ano);
        sink.record_existing("scores/rubric_anonymized.jsonl");

        for (const auto& endpoint : config.classifiers) {
            ClassifierClient client(endpoint, classifier_store, transport);
            if (endpoint.kind == "sentence_bias") {
                auto& std_rows = sentences_std[endpoint.id];
                auto& ano_rows = sentences_ano[endpoint.id];
                for (const auto& gr : reports) {
                    for (const auto& [section_id, text] : gr.report.sections()) {
                        for (auto& label : classify_sentences(text, client, config.run_mode)) {
                            LabeledSentence row;
                            row.label = std::move(label);
                            row.model = gr.report.model;
                            row.mode = gr.report.mode;
                            row.sector = gr.sector;
                            row.section = section_id;
                            (gr.report.mode == CvMode::standard ? std_rows : ano_rows)
                                .push_back(std::move(row));
                        }
                    }
                }
                const std::string stem = sanitize_component(endpoint.id);
                write_score_card(sink.root() / ("scores/sentences_" + stem + "_standard.jsonl"),
                                 std_rows);
                sink.record_existing("scores/sentences_" + stem + "_standard.jsonl");
                write_score_card(sink.root() / ("scores/sentences_" + stem + "_anonymized.jsonl"),
                                 ano_rows);
                sink.record_existing("scores/sentences_" + stem + "_anonymized.jsonl");
            } else {
                json rows = json::array();
                for (const auto& gr : reports) {
                    for (const auto& [section_id, text] : gr.report.sections()) {
                        for (const auto& label :
                             classify_distortions(text, client, config.run_mode)) {
                            json row = label.to_json();
                            row["model"] = gr.report.model;
                            row["mode"] = cv_mode_name(gr.report.mode);
                            row["sector"] = gr.sector;
                            row["section"] = section_id;
                            rows.push_back(std::move(row));
                        }
                    }
                }
                std::string lines;
                for (const auto& row : rows) lines += row.dump() + "\n";
                sink.write_text("scores/distortions_" + sanitize_component(endpoint.id) + ".jsonl",
                                lines);
            }
        }
    });

    stage("aggregate", sink.root(), [&] {
        MatrixProvenance prov{config.run_id, config.detector_profile};
        const long long reports_per_model_mode = std::max<size_t>(sampled_ids.size(), 1);

        auto by_model_type_std =
            aggregate(rubric_std, {GroupKey::model, GroupKey::bias_type}, prov);
        auto by_model_type_ano =
            aggregate(rubric_ano, {GroupKey::model, GroupKey::bias_type}, prov);
        auto by_type_std = aggregate(rubric_std, {GroupKey::bias_type}, prov);
        auto by_type_ano = aggregate(rubric_ano, {GroupKey::bias_type}, prov);

        emit_plot(by_model_type_std, PlotFormat::csv, sink.root() / "matrices/rubric_model_type_standard.csv");
        sink.record_existing("matrices/rubric_model_type_standard.csv");
        emit_plot(by_model_type_ano, PlotFormat::csv, sink.root() / "matrices/rubric_model_type_anonymized.csv");
        sink.record_existing("matrices/rubric_model_type_anonymized.csv");

        auto overall = compare_modes(by_type_std, by_type_ano);
        emit_plot(overall, PlotFormat::csv, sink.root() / "diffs/rubric_by_type.csv");
        sink.record_existing("diffs/rubric_by_type.csv");
        emit_plot(overall, PlotFormat::svg, sink.root() / "plots/rubric_by_type.svg",
                  "Bias level sums by type");
        sink.record_existing("plots/rubric_by_type.svg");

        // per-model grouped bars
        std::set<std::string> models;
        for (const auto& [key, _] : by_model_type_std.cells) models.insert(key[0]);
        for (const auto& model : models) {
            auto d = compare_modes(filter_first_key(by_model_type_std, model),
                                   filter_first_key(by_model_type_ano, model));
            std::string stem = sanitize_component(model);
            emit_plot(d, PlotFormat::csv, sink.root() / ("diffs/rubric_" + stem + ".csv"));
            sink.record_existing("diffs/rubric_" + stem + ".csv");
            emit_plot(d, PlotFormat::svg, sink.root() / ("plots/rubric_" + stem + ".svg"),
                      "Bias level sums: " + model);
            sink.record_existing("plots/rubric_" + stem + ".svg");
        }

        // heatmaps: per-report means over (model x type)
        auto heat_std = mean_matrix(by_model_type_std, reports_per_model_mode, "standard");
        emit_plot(heat_std, PlotFormat::svg, sink.root() / "plots/heatmap_mean_standard.svg",
                  "Mean bias level per report");
        sink.record_existing("plots/heatmap_mean_standard.svg");
        auto heat_ano = mean_matrix(by_model_type_ano, reports_per_model_mode, "anonymized");
        emit_plot(heat_ano, PlotFormat::svg, sink.root() / "plots/heatmap_mean_anonymized.svg",
                  "Mean bias level per report");
        sink.record_existing("plots/heatmap_mean_anonymized.svg");

        // model-per-section recommendation over both modes combined
        std::vector<ScoredSection> all_rubric = rubric_std;
        all_rubric.insert(all_rubric.end(), rubric_ano.begin(), rubric_ano.end());
        auto by_model_section = aggregate(all_rubric, {GroupKey::model, GroupKey::section}, prov);
        std::vector<std::string> model_order;
        for (const auto& p : config.providers) model_order.push_back(p.name);
        auto recommendation = recommend_composition(by_model_section, model_order);
        sink.write_json("recommendation.json", json(recommendation));

        // sentence classifiers: per-sector differentials
        for (const auto& endpoint : config.classifiers) {
            if (endpoint.kind != "sentence_bias") continue;
            MatrixProvenance cls_prov{config.run_id, endpoint.id};
            auto std_m = aggregate(sentences_std[endpoint.id], {GroupKey::sector}, cls_prov);
            auto ano_m = aggregate(sentences_ano[endpoint.id], {GroupKey::sector}, cls_prov);
            if (std_m.cells.empty() && ano_m.cells.empty()) continue;
            auto d = compare_modes(std_m, ano_m);
            std::string stem = sanitize_component(endpoint.id);
            emit_plot(d, PlotFormat::csv, sink.root() / ("diffs/sentences_" + stem + "_by_sector.csv"));
            sink.record_existing("diffs/sentences_" + stem + "_by_sector.csv");
            emit_plot(d, PlotFormat::svg, sink.root() / ("plots/sentences_" + stem + "_by_sector.svg"),
                      "Biased sentence counts by sector: " + endpoint.id);
            sink.record_existing("plots/sentences_" + stem + "_by_sector.svg");
        }
    });

    RunResult result;
    result.out_dir = sink.root();
    stage("manifest", sink.root(), [&] {
        json fixtures = json::object();
        for (const auto& [key, hash] : gateway.store().used()) fixtures[key] = hash;
        for (const auto& [key, hash] : classifier_store.used()) fixtures[key] = hash;
        json artifacts = json::object();
        for (const auto& [rel, hash] : sink.hashes()) artifacts[rel] = hash;

        json manifest = {{"config_hash", config.config_hash()},
                         {"run_id", config.run_id},
                         {"run_mode", run_mode_name(config.run_mode)},
                         {"fixtures", fixtures},
                         {"artifacts", artifacts}};
        std::string content = manifest.dump(2) + "\n";
        result.manifest_path = sink.root() / "manifest.json";
        std::ofstream out(result.manifest_path, std::ios::binary | std::ios::trunc);
        out << content;
        result.manifest_hash = sha256_hex(content);
    });
    return result;
}

std::vector<AuditRow> audit_document(const RunConfig& config,
                                     const std::filesystem::path& document,
                                     std::shared_ptr<Transport> transport,
                                     std::function<long long()> clock) {
    std::string text = read_text_file(document);
    GatewayConfig gw_config;
    gw_config.fixture_dir = config.fixture_dir;
    gw_config.max_attempts = config.max_attempts;
    gw_config.clock = std::move(clock);
    Gateway gateway(config.providers, gw_config, transport);
    return audit_text(text, gateway, config.detector_profile, config.run_mode);
}

SynthValidateResult synth_validate(const std::filesystem::path& spec_path,
                                   const std::filesystem::path& out_dir) {
    SynthSpec spec = SynthSpec::load(spec_path);
    GoldCorpus corpus = gen_corpus(spec);
    MockScoreCards cards = mock_pipeline(corpus, spec);

    MatrixProvenance prov{"synth", "mock-rubric"};
    auto std_m = aggregate(cards.std_rows, {GroupKey::bias_type}, prov);
    auto ano_m = aggregate(cards.ano_rows, {GroupKey::bias_type}, prov);
    auto diff = compare_modes(std_m, ano_m);

    SynthValidateResult result;
    result.report = evaluate_recovery(diff, spec, cards.section_count);

    std::filesystem::create_directories(out_dir);
    result.report_path = out_dir / "recovery.json";
    std::ofstream out(result.report_path, std::ios::binary | std::ios::trunc);
    if (!out) fail(errc::io, "cannot write recovery report: " + result.report_path.string());
    out << result.report.to_json().dump(2) << "\n";
    emit_plot(diff, PlotFormat::csv, out_dir / "recovery_diff.csv");
    return result;
}

} // namespace biasaudit
