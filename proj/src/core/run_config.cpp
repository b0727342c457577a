#include "core/run_config.hpp"

#include "core/errors.hpp"
#include "core/sha256.hpp"
#include "core/toml_lite.hpp"

namespace biasaudit {

using nlohmann::json;

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

const char* anon_mode_from_config(const std::string& s, AnonMode& out) {
    if (s == "remove") {
        out = AnonMode::remove;
        return nullptr;
    }
    if (s == "censor") {
        out = AnonMode::censor;
        return nullptr;
    }
    return "anonymization must be 'remove' or 'censor'";
}

} // namespace

RunConfig RunConfig::load(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) fail(errc::config, "config not found: " + path.string());
    const auto base = std::filesystem::absolute(path).parent_path();
    json doc = parse_toml_lite(read_text_file(path));

    RunConfig cfg;
    try {
        const json& corpus = doc.at("corpus");
        cfg.cv_manifest = resolve(base, corpus.at("cv_manifest").get<std::string>());
        cfg.jd_dir = resolve(base, corpus.at("jd_dir").get<std::string>());
        cfg.lexicon_path = resolve(base, corpus.at("lexicon").get<std::string>());
        if (corpus.contains("overrides")) {
            cfg.overrides_path = resolve(base, corpus.at("overrides").get<std::string>());
        }

        if (doc.contains("screening")) {
            const json& s = doc.at("screening");
            cfg.limits.max_tokens = s.value("max_tokens", cfg.limits.max_tokens);
            cfg.limits.chars_per_token = s.value("chars_per_token", cfg.limits.chars_per_token);
            if (s.contains("injection_patterns")) {
                cfg.limits.injection_patterns =
                    s.at("injection_patterns").get<std::vector<std::string>>();
            }
        }

        const json& run = doc.at("run");
        cfg.run_id = run.value("id", std::string("run"));
        cfg.run_mode = run_mode_from_name(run.value("run_mode", std::string("replay")));
        if (const char* err = anon_mode_from_config(run.value("anonymization", std::string("censor")),
                                                    cfg.anonymization)) {
            fail(errc::config, err);
        }
        cfg.censor_pronouns = run.value("censor_pronouns", false);
        cfg.n_tech = run.value("n_tech", size_t(20));
        cfg.n_nontech = run.value("n_nontech", size_t(20));
        cfg.seed = run.value("seed", uint64_t(0));
        cfg.out_dir = resolve(base, run.value("out_dir", std::string("out")));
        cfg.fixture_dir = resolve(base, run.value("fixture_dir", std::string("fixtures")));
        cfg.max_attempts = run.value("max_attempts", 3);

        if (!doc.contains("provider")) fail(errc::config, "config declares no [[provider]]");
        for (const auto& p : doc.at("provider")) {
            cfg.providers.push_back(ProviderProfile::from_json(p));
        }
        cfg.detector_profile = doc.at("detector").at("profile").get<std::string>();

        if (doc.contains("classifier")) {
            for (const auto& c : doc.at("classifier")) {
                cfg.classifiers.push_back(ClassifierEndpoint::from_json(c));
            }
        }

        if (doc.contains("prompt")) {
            const json& pr = doc.at("prompt");
            cfg.prompt.role_text = pr.value("role", cfg.prompt.role_text);
            cfg.prompt.task_text = pr.value("task", cfg.prompt.task_text);
            cfg.prompt.tone_text = pr.value("tone", cfg.prompt.tone_text);
            cfg.prompt.thought_process_text =
                pr.value("thought_process", cfg.prompt.thought_process_text);
            if (pr.contains("task_description")) {
                cfg.prompt.task_description_items =
                    pr.at("task_description").get<std::vector<std::string>>();
            }
        }
    } catch (const json::exception& e) {
        fail(errc::config, "config error in " + path.string() + ": " + e.what());
    }

    cfg.validate();
    return cfg;
}

void RunConfig::validate() const {
    auto must_exist = [](const std::filesystem::path& p, const char* what) {
        if (!std::filesystem::exists(p)) {
            fail(errc::config, std::string(what) + " not found: " + p.string());
        }
    };
    must_exist(cv_manifest, "cv manifest");
    must_exist(jd_dir, "job description directory");
    must_exist(lexicon_path, "lexicon");
    if (overrides_path) must_exist(*overrides_path, "overrides file");
    if (run_mode == RunMode::replay) must_exist(fixture_dir, "fixture store (replay mode)");

    if (providers.empty()) fail(errc::config, "no provider profiles configured");
    for (const auto& p : providers) p.validate();
    bool detector_found = false;
    for (const auto& p : providers) detector_found |= p.name == detector_profile;
    if (!detector_found) {
        fail(errc::config, "detector profile '" + detector_profile + "' is not a declared provider");
    }
    if (max_attempts <= 0) fail(errc::config, "max_attempts must be positive");
    if (limits.max_tokens == 0) fail(errc::config, "screening max_tokens must be positive");
}

json RunConfig::to_json() const {
    json providers_j = json::array();
    for (const auto& p : providers) providers_j.push_back(p.to_json());
    json classifiers_j = json::array();
    for (const auto& c : classifiers) classifiers_j.push_back(c.to_json());
    return {{"cv_manifest", cv_manifest.string()},
            {"jd_dir", jd_dir.string()},
            {"lexicon", lexicon_path.string()},
            {"overrides", overrides_path ? overrides_path->string() : ""},
            {"screening",
             {{"max_tokens", limits.max_tokens},
              {"chars_per_token", limits.chars_per_token},
              {"injection_patterns", limits.injection_patterns}}},
            {"providers", providers_j},
            {"detector", detector_profile},
            {"classifiers", classifiers_j},
            {"prompt",
             {{"role", prompt.role_text},
              {"task", prompt.task_text},
              {"tone", prompt.tone_text},
              {"task_description", prompt.task_description_items},
              {"thought_process", prompt.thought_process_text},
              {"schema", prompt.output_schema_id}}},
            {"run_id", run_id},
            {"run_mode", run_mode_name(run_mode)},
            {"anonymization", anon_mode_name(anonymization)},
            {"censor_pronouns", censor_pronouns},
            {"n_tech", n_tech},
            {"n_nontech", n_nontech},
            {"seed", seed},
            {"fixture_dir", fixture_dir.string()},
            {"max_attempts", max_attempts}};
}

std::string RunConfig::config_hash() const { return sha256_hex(to_json().dump()); }

} // namespace biasaudit
