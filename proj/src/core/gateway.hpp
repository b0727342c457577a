#pragma once

#include <chrono>
#include <condition_variable>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/fixture_store.hpp"
#include "core/jsonschema.hpp"
#include "core/transport.hpp"

namespace biasaudit {

enum class RunMode { live, record, replay };
const char* run_mode_name(RunMode m);
RunMode run_mode_from_name(const std::string& name); // throws config error

// Global sampling defaults; individual profiles may override.
inline constexpr double kDefaultTemperature = 0.25;
inline constexpr double kDefaultTopP = 0.5;

struct ProviderProfile {
    std::string name;
    std::string endpoint; // chat/completions-style URL
    std::string model_id;
    std::optional<double> temperature; // [0,1]
    std::optional<double> top_p;       // (0,1]
    int max_output_tokens = 2048;
    int token_limit = 8000;

    // request adapter, config-driven
    std::string api_key_env;                // env var NAME; value never logged
    std::string auth_header = "Authorization";
    std::string auth_prefix = "Bearer ";
    std::string response_text_pointer = "/choices/0/message/content";
    int max_parallel = 2;
    double requests_per_sec = 0.0; // token-bucket refill; 0 = unlimited

    void validate() const;
    nlohmann::json to_json() const; // excludes any secret material by design of the fields
    static ProviderProfile from_json(const nlohmann::json& j);
};

struct PromptSection {
    std::string tag;
    std::string text;
};

struct GenerationRequest {
    std::string profile_name;
    std::vector<PromptSection> sections;
    std::string schema_id;
    std::optional<double> temperature_override;
    std::optional<double> top_p_override;
};

// Override wins over profile, profile wins over the global default pair.
std::pair<double, double> effective_params(const ProviderProfile& profile,
                                           std::optional<double> temperature_override = {},
                                           std::optional<double> top_p_override = {});

struct TokenUsage {
    long long prompt_tokens = 0;
    long long completion_tokens = 0;
};

struct GenerationRecord {
    std::string cache_key;
    std::string response_text;
    bool validated = false;
    long long timestamp = 0; // unix seconds; 0 in shipped fixtures
    TokenUsage usage;

    nlohmann::json to_json() const;
    static GenerationRecord from_json(const nlohmann::json& j);
};

struct GatewayConfig {
    std::filesystem::path fixture_dir;
    int max_attempts = 3; // provider calls per generate before giving up
    int rate_limit_retries = 2;
    // injectable so tests do not sleep for real and recorded fixtures can
    // carry stable timestamps
    std::function<void(std::chrono::milliseconds)> sleeper;
    std::function<long long()> clock;
};

class Gateway {
public:
    Gateway(std::vector<ProviderProfile> profiles, GatewayConfig config,
            std::shared_ptr<Transport> transport = nullptr);
    ~Gateway();

    const ProviderProfile& profile(const std::string& name) const;
    SchemaRegistry& schemas() { return schemas_; }
    FixtureStore& store() { return store_; }

    // Pure function of (profile identity, sections, schema, effective
    // params); canonical serialization is UTF-8, sorted keys, no whitespace.
    static std::string cache_key(const ProviderProfile& profile, const GenerationRequest& request);

    // Returns the schema-validated document. live: network only. record:
    // serve from the fixture store when present, otherwise call and persist.
    // replay: store only, zero network.
    nlohmann::json generate_structured(const GenerationRequest& request, RunMode mode);

    long long network_calls() const;

private:
    struct ProviderState;

    nlohmann::json call_and_validate(const ProviderProfile& profile,
                                     const GenerationRequest& request, const std::string& key,
                                     RunMode mode);
    HttpResponse post_with_rate_limit(ProviderState& state, const ProviderProfile& profile,
                                      const std::string& body);

    std::vector<ProviderProfile> profiles_;
    GatewayConfig config_;
    std::shared_ptr<Transport> transport_;
    SchemaRegistry schemas_;
    FixtureStore store_;

    std::map<std::string, std::unique_ptr<ProviderState>> states_;
    mutable std::mutex counter_mutex_;
    long long network_calls_ = 0;
};

} // namespace biasaudit
