// biasaudit command line. Talks to the core exclusively through the C API in
// biasaudit.h; JSON parsing here is only for stdout formatting.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "biasaudit.h"

namespace {

// 0 success, 1 validation/tolerance failure, 2 usage/config error,
// 3 fixture/provider error
int exit_code_for(ba_status status) {
    switch (status) {
        case BA_OK:
            return 0;
        case BA_ERR_CONFIG:
        case BA_ERR_INVALID_ARGUMENT:
        case BA_ERR_EMPTY_INPUT:
        case BA_ERR_IO:
        case BA_ERR_OUT_OF_RANGE:
            return 2;
        case BA_ERR_FIXTURE_MISS:
        case BA_ERR_PROVIDER:
        case BA_ERR_RATE_LIMITED:
        case BA_ERR_ENDPOINT:
        case BA_ERR_BACKEND_UNAVAILABLE:
            return 3;
        default:
            return 1;
    }
}

int report_failure(const char* what, ba_status status) {
    std::cerr << what << " failed [" << ba_status_name(status) << "]: " << ba_last_error() << "\n";
    return exit_code_for(status);
}

struct OwnedString {
    char* ptr = nullptr;
    ~OwnedString() { ba_string_free(ptr); }
};

struct ConfigHandle {
    ba_run_config* ptr = nullptr;
    ~ConfigHandle() { ba_run_config_free(ptr); }
};

int load_config(const std::string& path, const std::string& run_mode, const std::string& out_dir,
                const std::string& seed, ConfigHandle& handle) {
    ba_status status = ba_run_config_load(path.c_str(), &handle.ptr);
    if (status != BA_OK) return report_failure("config load", status);
    auto apply = [&](const char* key, const std::string& value) -> int {
        if (value.empty()) return 0;
        ba_status s = ba_run_config_set(handle.ptr, key, value.c_str());
        return s == BA_OK ? 0 : report_failure(key, s);
    };
    if (int rc = apply("run_mode", run_mode)) return rc;
    if (int rc = apply("out_dir", out_dir)) return rc;
    if (int rc = apply("seed", seed)) return rc;
    return 0;
}

void print_audit_table(const nlohmann::json& rows) {
    std::printf("%-16s %-5s %s\n", "bias type", "level", "reasoning");
    std::printf("%-16s %-5s %s\n", "---------", "-----", "---------");
    for (const auto& row : rows) {
        std::printf("%-16s %-5d %s\n", row.at("type").get<std::string>().c_str(),
                     row.at("level").get<int>(), row.at("reasoning").get<std::string>().c_str());
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Differential bias audit for LLM-generated interview reports"};
    app.require_subcommand(1);
    app.set_version_flag("--version", ba_version());

    std::string config_path, run_mode, out_dir, seed;
    app.add_option("--config", config_path, "Run config file (TOML)");
    app.add_option("--run-mode", run_mode, "Override run mode: live|record|replay");
    app.add_option("--out", out_dir, "Override output directory");
    app.add_option("--seed", seed, "Override sampling seed");

    auto* cmd_run = app.add_subcommand("run", "Execute the full audit pipeline");

    std::string audit_file;
    auto* cmd_audit = app.add_subcommand("audit", "Score one document against the bias rubric");
    cmd_audit->add_option("file", audit_file, "Text document to audit")->required();
    std::string audit_json_out;
    cmd_audit->add_option("--json-out", audit_json_out, "Also write the rows as JSON here");

    std::string synth_spec;
    auto* cmd_synth = app.add_subcommand("synth-validate",
                                         "Differential recovery check on a synthetic corpus");
    cmd_synth->add_option("spec", synth_spec, "Synth spec JSON")->required();

    std::string classify_lexicon, classify_file;
    auto* cmd_classify = app.add_subcommand("classify", "Classify one CV into a job sector");
    cmd_classify->add_option("--lexicon", classify_lexicon, "Sector lexicon JSON")->required();
    cmd_classify->add_option("file", classify_file, "CV text file")->required();

    std::string anon_file, anon_mode = "censor";
    bool anon_pronouns = false;
    auto* cmd_anon = app.add_subcommand("anonymize", "Detect and transform PII in a text file");
    cmd_anon->add_option("file", anon_file, "Text file")->required();
    cmd_anon->add_option("--mode", anon_mode, "remove|censor (default censor)");
    cmd_anon->add_flag("--censor-pronouns", anon_pronouns, "Neutralize gendered pronouns");

    std::string plot_csv, plot_kind = "bar", plot_out;
    auto* cmd_plot = app.add_subcommand("plot", "Render a matrix CSV as an SVG chart");
    cmd_plot->add_option("csv", plot_csv, "Matrix CSV (key columns + value)")->required();
    cmd_plot->add_option("--kind", plot_kind, "bar|heatmap (default bar)");
    cmd_plot->add_option("--svg", plot_out, "Output SVG path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2; // usage errors
    }

    if (*cmd_run) {
        if (config_path.empty()) {
            std::cerr << "run requires --config\n";
            return 2;
        }
        ConfigHandle config;
        if (int rc = load_config(config_path, run_mode, out_dir, seed, config)) return rc;
        OwnedString manifest;
        ba_status status = ba_run_execute(config.ptr, &manifest.ptr);
        if (status != BA_OK) return report_failure("run", status);
        std::cout << "run complete: " << manifest.ptr << "\n";
        return 0;
    }

    if (*cmd_audit) {
        if (config_path.empty()) {
            std::cerr << "audit requires --config for the detector profile\n";
            return 2;
        }
        ConfigHandle config;
        if (int rc = load_config(config_path, run_mode, out_dir, seed, config)) return rc;
        OwnedString rows;
        ba_status status = ba_audit_file(config.ptr, audit_file.c_str(), &rows.ptr);
        if (status != BA_OK) return report_failure("audit", status);
        auto parsed = nlohmann::json::parse(rows.ptr);
        print_audit_table(parsed);
        if (!audit_json_out.empty()) {
            std::ofstream out(audit_json_out, std::ios::trunc);
            out << rows.ptr << "\n";
            std::cout << "wrote " << audit_json_out << "\n";
        }
        return 0;
    }

    if (*cmd_synth) {
        OwnedString report;
        int within = 0;
        std::string synth_out = out_dir.empty() ? "out/synth" : out_dir;
        ba_status status =
            ba_synth_validate(synth_spec.c_str(), synth_out.c_str(), &report.ptr, &within);
        if (status != BA_OK) return report_failure("synth-validate", status);
        auto parsed = nlohmann::json::parse(report.ptr);
        std::printf("%-16s %12s %12s %10s %10s %s\n", "bias type", "true", "measured", "error",
                     "bound", "ok");
        for (const auto& row : parsed.at("rows")) {
            std::printf("%-16s %12.1f %12.1f %10.1f %10.1f %s\n",
                         row.at("type").get<std::string>().c_str(),
                         row.at("true_delta").get<double>(), row.at("measured_delta").get<double>(),
                         row.at("abs_error").get<double>(), row.at("tolerance").get<double>(),
                         row.at("within").get<bool>() ? "yes" : "NO");
        }
        std::cout << (within ? "recovery within tolerance\n" : "recovery OUT OF tolerance\n");
        return within ? 0 : 1;
    }

    if (*cmd_classify) {
        OwnedString result;
        ba_status status =
            ba_classify_file(classify_lexicon.c_str(), classify_file.c_str(), &result.ptr);
        if (status != BA_OK) return report_failure("classify", status);
        std::cout << result.ptr << "\n";
        return 0;
    }

    if (*cmd_anon) {
        OwnedString result;
        ba_status status = ba_anonymize_file(anon_file.c_str(), anon_mode.c_str(),
                                             anon_pronouns ? 1 : 0, &result.ptr);
        if (status != BA_OK) return report_failure("anonymize", status);
        std::cout << result.ptr << "\n";
        return 0;
    }

    if (*cmd_plot) {
        ba_status status = ba_plot_csv(plot_csv.c_str(), plot_kind.c_str(), plot_out.c_str());
        if (status != BA_OK) return report_failure("plot", status);
        std::cout << "wrote " << plot_out << "\n";
        return 0;
    }

    return 2;
}
