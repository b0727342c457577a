#include "core/gateway.hpp"

#include <cstdlib>
#include <thread>

#include "core/errors.hpp"
#include "core/sha256.hpp"

namespace biasaudit {

using nlohmann::json;

const char* run_mode_name(RunMode m) {
    switch (m) {
        case RunMode::live: return "live";
        case RunMode::record: return "record";
        case RunMode::replay: return "replay";
    }
    return "replay";
}

RunMode run_mode_from_name(const std::string& name) {
    if (name == "live") return RunMode::live;
    if (name == "record") return RunMode::record;
    if (name == "replay") return RunMode::replay;
    fail(errc::config, "unknown run mode: " + name);
}

// ---------------------------------------------------------------------------
// profiles

void ProviderProfile::validate() const {
    if (name.empty()) fail(errc::config, "provider profile missing name");
    if (endpoint.empty()) fail(errc::config, "provider '" + name + "' missing endpoint");
    if (model_id.empty()) fail(errc::config, "provider '" + name + "' missing model_id");
    if (temperature && (*temperature < 0.0 || *temperature > 1.0)) {
        fail(errc::out_of_range, "provider '" + name + "': temperature out of [0,1]");
    }
    if (top_p && (*top_p <= 0.0 || *top_p > 1.0)) {
        fail(errc::out_of_range, "provider '" + name + "': top_p out of (0,1]");
    }
    if (max_output_tokens <= 0 || token_limit <= 0) {
        fail(errc::config, "provider '" + name + "': token limits must be positive");
    }
    if (max_parallel <= 0) fail(errc::config, "provider '" + name + "': max_parallel must be positive");
}

json ProviderProfile::to_json() const {
    json j = {{"name", name},
              {"endpoint", endpoint},
              {"model_id", model_id},
              {"max_output_tokens", max_output_tokens},
              {"token_limit", token_limit},
              {"api_key_env", api_key_env},
              {"auth_header", auth_header},
              {"auth_prefix", auth_prefix},
              {"response_text_pointer", response_text_pointer},
              {"max_parallel", max_parallel},
              {"requests_per_sec", requests_per_sec}};
    if (temperature) j["temperature"] = *temperature;
    if (top_p) j["top_p"] = *top_p;
    return j;
}

ProviderProfile ProviderProfile::from_json(const json& j) {
    ProviderProfile p;
    p.name = j.at("name").get<std::string>();
    p.endpoint = j.at("endpoint").get<std::string>();
    p.model_id = j.at("model_id").get<std::string>();
    if (j.contains("temperature")) p.temperature = j.at("temperature").get<double>();
    if (j.contains("top_p")) p.top_p = j.at("top_p").get<double>();
    p.max_output_tokens = j.value("max_output_tokens", 2048);
    p.token_limit = j.value("token_limit", 8000);
    p.api_key_env = j.value("api_key_env", std::string());
    p.auth_header = j.value("auth_header", std::string("Authorization"));
    p.auth_prefix = j.value("auth_prefix", std::string("Bearer "));
    p.response_text_pointer = j.value("response_text_pointer", std::string("/choices/0/message/content"));
    p.max_parallel = j.value("max_parallel", 2);
    p.requests_per_sec = j.value("requests_per_sec", 0.0);
    p.validate();
    return p;
}

std::pair<double, double> effective_params(const ProviderProfile& profile,
                                           std::optional<double> temperature_override,
                                           std::optional<double> top_p_override) {
    double t = temperature_override.value_or(profile.temperature.value_or(kDefaultTemperature));
    double p = top_p_override.value_or(profile.top_p.value_or(kDefaultTopP));
    if (t < 0.0 || t > 1.0) fail(errc::out_of_range, "temperature out of [0,1]");
    if (p <= 0.0 || p > 1.0) fail(errc::out_of_range, "top_p out of (0,1]");
    return {t, p};
}

json GenerationRecord::to_json() const {
    return {{"cache_key", cache_key},
            {"response_text", response_text},
            {"validated", validated},
            {"timestamp", timestamp},
            {"usage",
             {{"prompt_tokens", usage.prompt_tokens}, {"completion_tokens", usage.completion_tokens}}}};
}

GenerationRecord GenerationRecord::from_json(const json& j) {
    GenerationRecord r;
    r.cache_key = j.at("cache_key").get<std::string>();
    r.response_text = j.at("response_text").get<std::string>();
    r.validated = j.value("validated", false);
    r.timestamp = j.value("timestamp", 0LL);
    if (j.contains("usage")) {
        r.usage.prompt_tokens = j.at("usage").value("prompt_tokens", 0LL);
        r.usage.completion_tokens = j.at("usage").value("completion_tokens", 0LL);
    }
    return r;
}

// ---------------------------------------------------------------------------
// gateway

// per-provider parallelism bound + token bucket
struct Gateway::ProviderState {
    std::mutex mutex;
    std::condition_variable cv;
    int in_flight = 0;
    int max_parallel = 1;

    double tokens = 0.0;
    double refill_per_sec = 0.0; // 0 = unlimited
    std::chrono::steady_clock::time_point last_refill = std::chrono::steady_clock::now();
};

Gateway::Gateway(std::vector<ProviderProfile> profiles, GatewayConfig config,
                 std::shared_ptr<Transport> transport)
    : profiles_(std::move(profiles)),
      config_(std::move(config)),
      transport_(transport ? std::move(transport) : make_http_transport()),
      store_(config_.fixture_dir) {
    if (config_.max_attempts <= 0) fail(errc::config, "gateway max_attempts must be positive");
    if (!config_.sleeper) {
        config_.sleeper = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
    }
    if (!config_.clock) {
        config_.clock = [] { return static_cast<long long>(std::time(nullptr)); };
    }
    for (auto& p : profiles_) {
        p.validate();
        if (states_.count(p.name)) fail(errc::config, "duplicate provider profile: " + p.name);
        auto state = std::make_unique<ProviderState>();
        state->max_parallel = p.max_parallel;
        state->refill_per_sec = p.requests_per_sec;
        state->tokens = p.requests_per_sec > 0.0 ? p.requests_per_sec : 0.0;
        states_.emplace(p.name, std::move(state));
    }
}

Gateway::~Gateway() = default;

const ProviderProfile& Gateway::profile(const std::string& name) const {
    for (const auto& p : profiles_) {
        if (p.name == name) return p;
    }
    fail(errc::config, "unknown provider profile: " + name);
}

std::string Gateway::cache_key(const ProviderProfile& profile, const GenerationRequest& request) {
    auto [t, p] = effective_params(profile, request.temperature_override, request.top_p_override);
    json sections = json::array();
    for (const auto& s : request.sections) sections.push_back({s.tag, s.text});
    json canonical = {{"endpoint", profile.endpoint},
                      {"model_id", profile.model_id},
                      {"profile", profile.name},
                      {"params",
                       {{"temperature", t},
                        {"top_p", p},
                        {"max_output_tokens", profile.max_output_tokens}}},
                      {"schema", request.schema_id},
                      {"sections", sections}};
    // nlohmann::json objects iterate sorted by key; dump() emits no
    // insignificant whitespace
    return sha256_hex(canonical.dump());
}

long long Gateway::network_calls() const {
    std::lock_guard<std::mutex> lock(counter_mutex_);
    return network_calls_;
}

HttpResponse Gateway::post_with_rate_limit(ProviderState& state, const ProviderProfile& profile,
                                           const std::string& body) {
    // token bucket
    if (state.refill_per_sec > 0.0) {
        std::unique_lock<std::mutex> lock(state.mutex);
        for (;;) {
            auto now = std::chrono::steady_clock::now();
            double elapsed = std::chrono::duration<double>(now - state.last_refill).count();
            state.last_refill = now;
            state.tokens = std::min(state.refill_per_sec,
                                    state.tokens + elapsed * state.refill_per_sec);
            if (state.tokens >= 1.0) {
                state.tokens -= 1.0;
                break;
            }
            double wait_s = (1.0 - state.tokens) / state.refill_per_sec;
            lock.unlock();
            config_.sleeper(std::chrono::milliseconds(long(wait_s * 1000.0) + 1));
            lock.lock();
        }
    }

    std::vector<std::pair<std::string, std::string>> headers;
    if (!profile.api_key_env.empty()) {
        const char* key = std::getenv(profile.api_key_env.c_str());
        if (!key || !*key) {
            fail(errc::provider,
                 "provider '" + profile.name + "': environment variable " + profile.api_key_env +
                     " is not set");
        }
        headers.emplace_back(profile.auth_header, profile.auth_prefix + key);
    }

    for (int rl_attempt = 0;; ++rl_attempt) {
        {
            std::lock_guard<std::mutex> lock(counter_mutex_);
            ++network_calls_;
        }
        HttpResponse resp = transport_->post(profile.endpoint, headers, body);
        if (resp.status == 429) {
            if (rl_attempt >= config_.rate_limit_retries) {
                fail(errc::rate_limited, "provider '" + profile.name + "': rate limited");
            }
            long wait_ms = 1000;
            auto it = resp.headers.find("Retry-After");
            if (it != resp.headers.end()) {
                try {
                    wait_ms = std::stol(it->second) * 1000;
                } catch (...) {
                }
            }
            config_.sleeper(std::chrono::milliseconds(wait_ms));
            continue;
        }
        return resp;
    }
}

nlohmann::json Gateway::call_and_validate(const ProviderProfile& profile,
                                          const GenerationRequest& request, const std::string& key,
                                          RunMode mode) {
    auto [temperature, top_p] = effective_params(profile, request.temperature_override,
                                                 request.top_p_override);

    // Sections are serialized in order into a single user message; providers
    // see one labeled prompt while the cache key still covers each section.
    std::string prompt;
    for (const auto& s : request.sections) {
        prompt += "### " + s.tag + "\n" + s.text + "\n\n";
    }
    json body = {{"model", profile.model_id},
                 {"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
                 {"temperature", temperature},
                 {"top_p", top_p},
                 {"max_tokens", profile.max_output_tokens}};
    const std::string body_str = body.dump();

    auto& state = *states_.at(profile.name);
    std::vector<std::string> last_violations;
    for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
        // parallelism bound
        {
            std::unique_lock<std::mutex> lock(state.mutex);
            state.cv.wait(lock, [&] { return state.in_flight < state.max_parallel; });
            ++state.in_flight;
        }
        HttpResponse resp;
        try {
            resp = post_with_rate_limit(state, profile, body_str);
        } catch (...) {
            std::lock_guard<std::mutex> lock(state.mutex);
            --state.in_flight;
            state.cv.notify_one();
            throw;
        }
        {
            std::lock_guard<std::mutex> lock(state.mutex);
            --state.in_flight;
            state.cv.notify_one();
        }

        if (resp.status != 200) {
            fail(errc::provider, "provider '" + profile.name + "' returned HTTP " +
                                     std::to_string(resp.status));
        }

        json envelope = json::parse(resp.body, nullptr, false);
        std::string text;
        if (!envelope.is_discarded()) {
            json::json_pointer ptr(profile.response_text_pointer);
            if (envelope.contains(ptr) && envelope.at(ptr).is_string()) {
                text = envelope.at(ptr).get<std::string>();
            }
        }
        if (text.empty()) text = resp.body; // some endpoints return the document directly

        json doc = lenient_parse_json(text);
        if (!doc.is_discarded()) {
            last_violations = schemas_.validate(request.schema_id, doc);
            if (last_violations.empty()) {
                if (mode == RunMode::record) {
                    GenerationRecord record;
                    record.cache_key = key;
                    record.response_text = text;
                    record.validated = true;
                    record.timestamp = config_.clock();
                    if (!envelope.is_discarded() && envelope.contains("usage")) {
                        record.usage.prompt_tokens = envelope["usage"].value("prompt_tokens", 0LL);
                        record.usage.completion_tokens =
                            envelope["usage"].value("completion_tokens", 0LL);
                    }
                    store_.put(key, record.to_json());
                }
                return doc;
            }
        } else {
            last_violations = {"$: response is not JSON"};
        }
        // retry with identical parameters
    }

    std::string detail = last_violations.empty() ? "" : " (" + last_violations.front() + ")";
    fail(errc::schema_validation_exhausted,
         "provider '" + profile.name + "': schema '" + request.schema_id + "' not satisfied after " +
             std::to_string(config_.max_attempts) + " attempts" + detail);
}

nlohmann::json Gateway::generate_structured(const GenerationRequest& request, RunMode mode) {
    if (request.sections.empty()) fail(errc::invalid_argument, "generation request has no sections");
    if (!schemas_.has(request.schema_id)) fail(errc::config, "unknown schema id: " + request.schema_id);

    const ProviderProfile& prof = profile(request.profile_name);
    const std::string key = cache_key(prof, request);

    if (mode == RunMode::replay || mode == RunMode::record) {
        if (auto stored = store_.get(key)) {
            GenerationRecord record = GenerationRecord::from_json(*stored);
            json doc = lenient_parse_json(record.response_text);
            if (doc.is_discarded()) {
                fail(errc::schema_validation_exhausted, "stored record is not JSON: " + key);
            }
            auto violations = schemas_.validate(request.schema_id, doc);
            if (!violations.empty()) {
                fail(errc::schema_validation_exhausted,
                     "stored record fails schema '" + request.schema_id + "': " + violations.front());
            }
            return doc;
        }
        if (mode == RunMode::replay) {
            fail(errc::fixture_miss, "no fixture for cache key " + key);
        }
    }

    return call_and_validate(prof, request, key, mode);
}

} // namespace biasaudit
