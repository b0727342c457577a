#include <doctest.h>

#include <set>

#include "core/bias_detect.hpp"
#include "core/textutil.hpp"
#include "core/errors.hpp"
#include "core/run_config.hpp"
#include "support/canned_provider.hpp"
#include "support/fixture_texts.hpp"

using namespace biasaudit;
using nlohmann::json;

namespace {

const std::filesystem::path kDataDir = BIASAUDIT_DATA_DIR;

std::filesystem::path temp_store(const std::string& tag) {
    auto dir = std::filesystem::temp_directory_path() / ("ba_detect_" + tag);
    std::filesystem::remove_all(dir);
    return dir;
}

ProviderProfile detector_profile(int token_limit = 8000) {
    ProviderProfile p;
    p.name = "sonnet";
    p.endpoint = "http://providers.invalid/v1/chat/completions";
    p.model_id = "claude-3-5-sonnet";
    p.token_limit = token_limit;
    return p;
}

SectionBiasScore sample_score() {
    SectionBiasScore s;
    s.report_ref = {"cv-1", CvMode::standard, "sonnet"};
    s.section = "overview";
    s.set_level(BiasType::gender, 2);
    s.set_level(BiasType::age, 1);
    return s;
}

ClassifierEndpoint bias_endpoint() {
    ClassifierEndpoint e;
    e.id = "d4data-bias";
    e.url = "http://classifiers.invalid/models/d4data/bias-detection-model";
    e.kind = "sentence_bias";
    e.label_map = {{"Biased", "biased"}, {"Non-biased", "non_biased"}};
    return e;
}

ClassifierEndpoint distortion_endpoint() {
    ClassifierEndpoint e;
    e.id = "cognitive-distortion";
    e.url = "http://classifiers.invalid/models/amedvedev/bert-tiny-cognitive-distortion";
    e.kind = "distortion";
    return e;
}

} // namespace

TEST_SUITE("bias_detect") {

TEST_CASE("the eight bias types keep their declared order") {
    const auto& types = all_bias_types();
    REQUIRE(types.size() == 8);
    CHECK(std::string(bias_type_name(types[0])) == "gender");
    CHECK(std::string(bias_type_name(types[1])) == "racial_ethnic");
    CHECK(std::string(bias_type_name(types[7])) == "political");
    CHECK(bias_type_from_name("socioeconomic") == BiasType::socioeconomic);
    CHECK_THROWS_AS(bias_type_from_name("unknown"), error);
}

TEST_CASE("section scores always serialize all eight types") {
    json j = sample_score().to_json();
    REQUIRE(j.at("scores").size() == 8);
    for (BiasType t : all_bias_types()) CHECK(j.at("scores").contains(bias_type_name(t)));
}

TEST_CASE("partial score maps are rejected on parse") {
    json j = sample_score().to_json();
    j["scores"].erase("religious");
    CHECK_THROWS_WITH_AS(SectionBiasScore::from_json(j), doctest::Contains("religious"), error);

    json bad_level = sample_score().to_json();
    bad_level["scores"]["gender"] = 3;
    CHECK_THROWS_AS(SectionBiasScore::from_json(bad_level), error);
}

TEST_CASE("score round-trip preserves levels and reasoning") {
    SectionBiasScore s = sample_score();
    std::array<std::string, kBiasTypeCount> reasons{};
    reasons[size_t(BiasType::gender)] = "gendered phrasing";
    s.reasoning = reasons;
    SectionBiasScore back = SectionBiasScore::from_json(s.to_json());
    CHECK(back.level(BiasType::gender) == 2);
    CHECK(back.level(BiasType::age) == 1);
    CHECK(back.level(BiasType::cultural) == 0);
    REQUIRE(back.reasoning.has_value());
    CHECK((*back.reasoning)[size_t(BiasType::gender)] == "gendered phrasing");
}

TEST_CASE("score_section rejects empty text") {
    GatewayConfig cfg{temp_store("empty")};
    Gateway gateway({detector_profile()}, cfg, std::make_shared<testing::CannedProviderTransport>());
    CHECK_THROWS_AS(score_section("  \n", gateway, "sonnet", false, RunMode::live), error);
}

TEST_CASE("shipped fixtures replay the rubric examples") {
    RunConfig config = RunConfig::load(kDataDir / "demo" / "config.toml");
    Gateway gateway(config.providers, {config.fixture_dir}, nullptr);

    SectionBiasScore gendered = score_section(testing::kGenderedSection, gateway, "sonnet",
                                              false, RunMode::replay);
    CHECK(gendered.level(BiasType::gender) >= 1); // flagged at level 1 or 2
    CHECK(gendered.level(BiasType::gender) <= 2);

    SectionBiasScore neutral = score_section(testing::kNeutralCandidateSection, gateway, "sonnet",
                                             false, RunMode::replay);
    CHECK(neutral.level(BiasType::gender) == 0);

    SectionBiasScore zero = score_section(testing::kAllZeroSection, gateway, "sonnet", false,
                                          RunMode::replay);
    for (BiasType t : all_bias_types()) {
        INFO(bias_type_name(t));
        CHECK(zero.level(t) == 0);
    }
    CHECK(gateway.network_calls() == 0);
}

TEST_CASE("audit chunks at paragraph boundaries and takes the per-type max") {
    // force two chunks with a small token budget; gendered paragraph drives
    // the max while the neutral one scores zero
    std::string gendered_para =
        "She owns the roadmap and her reviews are thorough. She mentors two designers.";
    std::string neutral_para = "The process documentation stays current and audited.";
    std::string doc = gendered_para + "\n\n" + neutral_para;

    auto chunks = chunk_paragraphs(doc, 12);
    REQUIRE(chunks.size() == 2);
    CHECK(chunks[0] + chunks[1] == doc);

    auto transport = std::make_shared<testing::CannedProviderTransport>();
    GatewayConfig cfg{temp_store("audit")};
    cfg.clock = [] { return 0LL; };
    Gateway gateway({detector_profile(12)}, cfg, transport);
    auto rows = audit_text(doc, gateway, "sonnet", RunMode::record);
    REQUIRE(rows.size() == 8);
    CHECK(transport->calls == 2); // one per chunk
    CHECK(rows[size_t(BiasType::gender)].level == 2);
    CHECK(!rows[size_t(BiasType::gender)].reasoning.empty());
    CHECK(rows[size_t(BiasType::religious)].level == 0);

    CHECK_THROWS_AS(audit_text("", gateway, "sonnet", RunMode::record), error);
}

TEST_CASE("auditing a single neutral sentence yields all-zero levels") {
    auto transport = std::make_shared<testing::CannedProviderTransport>();
    GatewayConfig cfg{temp_store("neutral")};
    cfg.clock = [] { return 0LL; };
    Gateway gateway({detector_profile()}, cfg, transport);
    auto rows = audit_text("The filing deadline is the last business day of the month.", gateway,
                           "sonnet", RunMode::record);
    REQUIRE(rows.size() == 8);
    for (const auto& row : rows) {
        INFO(bias_type_name(row.type));
        CHECK(row.level == 0);
    }
}

TEST_CASE("flagged types without reasoning are a contract violation") {
    struct MissingReason : Transport {
        HttpResponse post(const std::string&,
                          const std::vector<std::pair<std::string, std::string>>&,
                          const std::string&) override {
            json content = json::object();
            for (BiasType t : all_bias_types()) {
                content[bias_type_name(t)] = {{"level", t == BiasType::gender ? 2 : 0},
                                              {"reasoning", ""}};
            }
            json envelope = {
                {"choices",
                 json::array({json{{"message", json{{"content", content.dump()}}}}})}};
            return {200, envelope.dump(), {}};
        }
    };
    Gateway gateway({detector_profile()}, {temp_store("noreason")},
                    std::make_shared<MissingReason>());
    CHECK_THROWS_AS(score_section("text", gateway, "sonnet", true, RunMode::live), error);
}

TEST_CASE("classify_sentences keeps count and order") {
    auto transport = std::make_shared<testing::CannedProviderTransport>();
    FixtureStore store(temp_store("sent"));
    ClassifierClient client(bias_endpoint(), store, transport);

    std::string text = "She writes careful reviews. The process stays stable.";
    auto labels = classify_sentences(text, client, RunMode::record);
    REQUIRE(labels.size() == 2);
    CHECK(labels[0].sentence == "She writes careful reviews.");
    CHECK(labels[0].biased == true);
    CHECK(labels[1].biased == false);
    CHECK(labels[0].classifier_id == "d4data-bias");

    // replay path returns identical labels with no network call
    ClassifierClient replay_client(bias_endpoint(), store, transport);
    auto replayed = classify_sentences(text, replay_client, RunMode::replay);
    CHECK(replay_client.network_calls() == 0);
    REQUIRE(replayed.size() == 2);
    CHECK(replayed[0].biased == labels[0].biased);

    CHECK_THROWS_AS(classify_sentences("", client, RunMode::record), error);
}

TEST_CASE("biased count matches a brute-force tally over the fixture file") {
    auto transport = std::make_shared<testing::CannedProviderTransport>();
    auto dir = temp_store("tally");
    FixtureStore store(dir);
    ClassifierClient client(bias_endpoint(), store, transport);

    std::string report_text =
        "She leads the practice. Deadlines hold steady. His estimates are optimistic. "
        "Reviews happen weekly. The Thai market plan shipped.";
    auto labels = classify_sentences(report_text, client, RunMode::record);

    // independent tally straight from the recorded fixture bytes
    auto key = ClassifierClient::batch_key(bias_endpoint(), segment_sentences(report_text));
    auto record = store.get(key);
    REQUIRE(record.has_value());
    size_t fixture_biased = 0;
    for (const auto& item : record->at("response")) {
        if (item.at("label").get<std::string>() == std::string("Biased")) ++fixture_biased;
    }
    size_t labeled_biased = 0;
    for (const auto& label : labels) labeled_biased += label.biased ? 1 : 0;
    CHECK(labeled_biased == fixture_biased);
    CHECK(labeled_biased == 3);
}

TEST_CASE("wu-style LABEL_0/LABEL_1 outputs map without an explicit table") {
    auto transport = std::make_shared<testing::CannedProviderTransport>();
    FixtureStore store(temp_store("wu"));
    ClassifierEndpoint wu;
    wu.id = "wu-distilbert";
    wu.url = "http://classifiers.invalid/models/wu981526092/bias_classifier_distilbert";
    wu.kind = "sentence_bias";
    ClassifierClient client(wu, store, transport);
    auto labels = classify_sentences("Her plan is solid. Nothing else moved.", client,
                                     RunMode::record);
    REQUIRE(labels.size() == 2);
    CHECK(labels[0].biased == true);
    CHECK(labels[1].biased == false);
}

TEST_CASE("unmappable labels and count mismatches are endpoint errors") {
    struct WeirdLabels : Transport {
        json payload;
        HttpResponse post(const std::string&,
                          const std::vector<std::pair<std::string, std::string>>&,
                          const std::string&) override {
            return {200, payload.dump(), {}};
        }
    };
    auto transport = std::make_shared<WeirdLabels>();
    FixtureStore store(temp_store("weird"));
    ClassifierClient client(bias_endpoint(), store, transport);

    transport->payload = json::array({json{{"label", "Sideways"}, {"score", 0.5}}});
    try {
        classify_sentences("One sentence only.", client, RunMode::live);
        FAIL("expected endpoint error");
    } catch (const error& e) {
        CHECK(e.code() == errc::endpoint);
    }

    transport->payload = json::array(); // zero labels for one sentence
    CHECK_THROWS_AS(classify_sentences("One sentence only.", client, RunMode::live), error);
}

TEST_CASE("distortion detection finds labeling and catastrophizing in weaknesses") {
    auto transport = std::make_shared<testing::CannedProviderTransport>();
    FixtureStore store(temp_store("dist"));
    ClassifierClient client(distortion_endpoint(), store, transport);

    std::string weaknesses =
        "The candidate lacks documented certification. There is a risk of falling behind "
        "on every front. Output stays readable.";
    auto labels = classify_distortions(weaknesses, client, RunMode::record);
    REQUIRE(labels.size() == 3);
    std::set<DistortionCategory> seen;
    for (const auto& label : labels) seen.insert(label.category);
    CHECK(seen.count(DistortionCategory::labeling) == 1);
    CHECK(seen.count(DistortionCategory::catastrophizing) == 1);

    // overview-style text is mostly no_distortion
    std::string overview =
        "The report covers the role. The materials are organized. Scope stays realistic.";
    auto overview_labels = classify_distortions(overview, client, RunMode::record);
    size_t none = 0;
    for (const auto& label : overview_labels) {
        none += label.category == DistortionCategory::no_distortion ? 1 : 0;
    }
    CHECK(none * 2 > overview_labels.size()); // majority

    CHECK_THROWS_AS(classify_distortions("", client, RunMode::record), error);
}

TEST_CASE("audit rows serialize per type with reasoning") {
    std::vector<AuditRow> rows = {{BiasType::gender, 0, ""}, {BiasType::cultural, 2, "narrow frame"}};
    json j = audit_rows_to_json(rows);
    REQUIRE(j.size() == 2);
    CHECK(j[1].at("type") == "cultural");
    CHECK(j[1].at("level") == 2);
    CHECK(j[1].at("reasoning") == "narrow frame");
}

} // TEST_SUITE
