#include <doctest.h>

#include <set>

#include "core/anonymizer.hpp"
#include "core/errors.hpp"
#include "core/gateway.hpp"
#include "core/prng.hpp"
#include "support/canned_provider.hpp"

using namespace biasaudit;

namespace {

PiiSpan span_of(const std::string& text, const std::string& surface, PiiCategory category) {
    size_t pos = text.find(surface);
    REQUIRE(pos != std::string::npos);
    return PiiSpan{pos, pos + surface.size(), category, surface};
}

// naive splice oracle: concatenates the gaps between sorted spans
std::string splice_oracle(const std::string& text, std::vector<PiiSpan> spans) {
    std::sort(spans.begin(), spans.end(),
              [](const PiiSpan& a, const PiiSpan& b) { return a.start < b.start; });
    std::string out;
    size_t cursor = 0;
    for (const auto& s : spans) {
        out += text.substr(cursor, s.start - cursor);
        cursor = s.end;
    }
    out += text.substr(cursor);
    return out;
}

// bytes of `text` not covered by any span, in order
std::string outside_bytes(const std::string& text, const std::vector<PiiSpan>& spans) {
    return splice_oracle(text, spans);
}

} // namespace

TEST_SUITE("anonymizer") {

TEST_CASE("rules backend finds an email as contact") {
    std::string text = "contact: jane.doe@mail.com";
    auto spans = detect_pii(text);
    REQUIRE(spans.size() == 1);
    CHECK(spans[0].category == PiiCategory::contact);
    CHECK(spans[0].surface == "jane.doe@mail.com");
    CHECK(text.substr(spans[0].start, spans[0].end - spans[0].start) == spans[0].surface);
}

TEST_CASE("rules backend marks age, nationality, and gender in a profile line") {
    auto spans = detect_pii("a 34-year-old Thai female with settled residency");
    std::set<PiiCategory> cats;
    for (const auto& s : spans) cats.insert(s.category);
    CHECK(cats.count(PiiCategory::age) == 1);
    CHECK(cats.count(PiiCategory::nationality_ethnicity) == 1);
    CHECK(cats.count(PiiCategory::gender_marker) == 1);
    for (const auto& s : spans) {
        if (s.category == PiiCategory::age) CHECK(s.surface == "34-year-old");
    }
}

TEST_CASE("rules backend covers phones, handle urls, honorifics, dob, labels") {
    auto spans = detect_pii("Dr. Alice Wong, born: 12/03/1989, phone +1 415 555 0198, "
                            "see github.com/alicew for code. Age: 34.");
    std::set<PiiCategory> cats;
    for (const auto& s : spans) cats.insert(s.category);
    CHECK(cats.count(PiiCategory::name) == 1);
    CHECK(cats.count(PiiCategory::contact) == 1);
    CHECK(cats.count(PiiCategory::date_of_birth) == 1);
    CHECK(cats.count(PiiCategory::age) == 1);
}

TEST_CASE("year ranges do not trip the phone rule") {
    CHECK(detect_pii("tenure 2019 - 2023 at the firm").empty());
}

TEST_CASE("no pii yields an empty span list, empty text errors") {
    CHECK(detect_pii("plain text about process improvement").empty());
    CHECK_THROWS_AS(detect_pii(""), error);
}

TEST_CASE("rules backend is deterministic") {
    std::string text = "Ms. Jane Doe, jane@x.io, Age: 31, based in Prague";
    auto a = detect_pii(text);
    auto b = detect_pii(text);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].start == b[i].start);
        CHECK(a[i].end == b[i].end);
        CHECK(a[i].category == b[i].category);
    }
}

TEST_CASE("overlap merge keeps the widest span") {
    std::string text = "abcdefghij";
    std::vector<PiiSpan> cands = {
        {2, 5, PiiCategory::name, ""},
        {1, 8, PiiCategory::contact, ""}, // widest wins
        {4, 6, PiiCategory::age, ""},
    };
    auto merged = merge_spans(cands, text);
    REQUIRE(merged.size() == 1);
    CHECK(merged[0].start == 1);
    CHECK(merged[0].end == 8);
    CHECK(merged[0].category == PiiCategory::contact);
}

TEST_CASE("equal-width overlap keeps the earlier input") {
    std::string text = "abcdefghij";
    std::vector<PiiSpan> cands = {
        {2, 6, PiiCategory::name, ""},
        {2, 6, PiiCategory::age, ""},
    };
    auto merged = merge_spans(cands, text);
    REQUIRE(merged.size() == 1);
    CHECK(merged[0].category == PiiCategory::name);
}

TEST_CASE("remove deletes a leading span cleanly") {
    std::string text = "Jane Doe, engineer";
    auto result = anonymize_remove(text, {span_of(text, "Jane Doe, ", PiiCategory::name)});
    CHECK(result.text == "engineer");
    CHECK(result.mode == AnonMode::remove);
}

TEST_CASE("remove with no spans is the identity") {
    auto result = anonymize_remove("unchanged text", {});
    CHECK(result.text == "unchanged text");
}

TEST_CASE("remove of three disjoint spans equals the naive splice") {
    // spans cover their trailing space, so the splice needs no cleanup
    std::string text = "alpha beta gamma delta epsilon zeta final";
    std::vector<PiiSpan> spans = {span_of(text, "beta ", PiiCategory::name),
                                  span_of(text, "delta ", PiiCategory::location),
                                  span_of(text, "zeta ", PiiCategory::other_personal)};
    auto result = anonymize_remove(text, spans);
    CHECK(result.text == splice_oracle(text, spans));
    CHECK(result.text == "alpha gamma epsilon final");
}

TEST_CASE("remove cleans up stranded separators and doubled spaces") {
    std::string text = "Hello Jane Doe, engineer";
    auto r1 = anonymize_remove(text, {span_of(text, "Jane Doe", PiiCategory::name)});
    CHECK(r1.text == "Hello, engineer");

    std::string text2 = "word1 XX word2";
    auto r2 = anonymize_remove(text2, {span_of(text2, "XX", PiiCategory::name)});
    CHECK(r2.text == "word1 word2");

    std::string text3 = "Jane Doe, engineer";
    auto r3 = anonymize_remove(text3, {span_of(text3, "Jane Doe", PiiCategory::name)});
    CHECK(r3.text == "engineer");

    std::string text4 = "lead line\nJane Doe\nnext line";
    auto r4 = anonymize_remove(text4, {span_of(text4, "Jane Doe", PiiCategory::name)});
    CHECK(r4.text == "lead line\n\nnext line");
}

TEST_CASE("remove handles adjacent, whole-text, and trailing spans") {
    std::string adjacent = "AABBcc";
    auto r1 = anonymize_remove(adjacent, {{0, 2, PiiCategory::name, ""},
                                          {2, 4, PiiCategory::age, ""}});
    CHECK(r1.text == "cc");

    std::string whole = "xyz";
    auto r2 = anonymize_remove(whole, {{0, 3, PiiCategory::name, ""}});
    CHECK(r2.text == "");

    std::string trailing = "ab cd";
    auto r3 = anonymize_remove(trailing, {{3, 5, PiiCategory::name, ""}});
    CHECK(r3.text == "ab");
}

TEST_CASE("remove never leaves the span surface behind") {
    std::string text = "Reach Ms. Jane Doe at jane.doe@mail.com or +1 415 555 0198 today.";
    auto result = anonymize_remove(text, detect_pii(text));
    CHECK(result.text.find("jane.doe@mail.com") == std::string::npos);
    CHECK(result.text.find("Jane Doe") == std::string::npos);
}

TEST_CASE("censor replaces spans with category placeholders") {
    std::string text = "Jane Doe applied. Age: 34 listed.";
    auto result = anonymize_censor(text, {span_of(text, "Jane Doe", PiiCategory::name),
                                          span_of(text, "Age: 34", PiiCategory::age)});
    CHECK(result.text == "[Candidate's Name] applied. [Candidate's Age] listed.");
    REQUIRE(result.placeholder_map.size() == 2);
    CHECK(result.placeholder_map[0].second == "[Candidate's Name]");
    CHECK(result.placeholder_map[1].second == "[Candidate's Age]");
}

TEST_CASE("all nine categories have the fixed placeholder strings") {
    CHECK(std::string(placeholder_for(PiiCategory::name)) == "[Candidate's Name]");
    CHECK(std::string(placeholder_for(PiiCategory::contact)) == "[Contact Details]");
    CHECK(std::string(placeholder_for(PiiCategory::location)) == "[Location]");
    CHECK(std::string(placeholder_for(PiiCategory::age)) == "[Candidate's Age]");
    CHECK(std::string(placeholder_for(PiiCategory::date_of_birth)) == "[Date of Birth]");
    CHECK(std::string(placeholder_for(PiiCategory::gender_marker)) == "[Gender]");
    CHECK(std::string(placeholder_for(PiiCategory::nationality_ethnicity)) == "[Nationality]");
    CHECK(std::string(placeholder_for(PiiCategory::photo_reference)) == "[Photo]");
    CHECK(std::string(placeholder_for(PiiCategory::other_personal)) == "[Personal Detail]");
}

TEST_CASE("censor with no spans returns the input with an empty map") {
    auto result = anonymize_censor("nothing here", {});
    CHECK(result.text == "nothing here");
    CHECK(result.placeholder_map.empty());
}

TEST_CASE("censor round-trips through the placeholder map on random inputs") {
    const std::string alphabet = "abcdef ghij.kl,mn op";
    for (uint64_t iter = 0; iter < 200; ++iter) {
        std::string text;
        size_t len = 20 + bounded(counter_hash(501, {iter, 0}), 180);
        for (size_t i = 0; i < len; ++i) {
            text.push_back(alphabet[bounded(counter_hash(501, {iter, 1, i}), alphabet.size())]);
        }
        // random non-overlapping spans
        std::vector<PiiSpan> spans;
        size_t cursor = 0;
        size_t n_spans = bounded(counter_hash(501, {iter, 2}), 5);
        for (size_t s = 0; s < n_spans && cursor + 3 < text.size(); ++s) {
            size_t start = cursor + bounded(counter_hash(501, {iter, 3, s}), text.size() - cursor - 2);
            size_t max_len = text.size() - start;
            size_t span_len = 1 + bounded(counter_hash(501, {iter, 4, s}), std::min<size_t>(9, max_len - 1));
            PiiSpan span;
            span.start = start;
            span.end = start + span_len;
            span.category = PiiCategory(bounded(counter_hash(501, {iter, 5, s}), 9));
            spans.push_back(span);
            cursor = span.end;
        }
        auto result = anonymize_censor(text, spans, "t");
        // inverse reconstruction is byte-exact
        CHECK(reconstruct_original(result) == text);
        // bytes outside placeholders equal bytes outside spans
        std::vector<PiiSpan> out_spans;
        size_t delta = 0;
        std::string censored = result.text;
        for (const auto& [span, placeholder] : result.placeholder_map) {
            PiiSpan ph_span;
            ph_span.start = span.start + delta;
            ph_span.end = ph_span.start + placeholder.size();
            out_spans.push_back(ph_span);
            delta += placeholder.size() - (span.end - span.start);
        }
        CHECK(outside_bytes(censored, out_spans) == outside_bytes(text, result.spans));
    }
}

TEST_CASE("span validation rejects out-of-bounds and overlap") {
    CHECK_THROWS_AS(anonymize_remove("short", {{2, 99, PiiCategory::name, ""}}), error);
    CHECK_THROWS_AS(anonymize_censor("short", {{3, 3, PiiCategory::name, ""}}), error);
    std::vector<PiiSpan> overlapping = {{0, 4, PiiCategory::name, ""},
                                        {2, 5, PiiCategory::name, ""}};
    try {
        anonymize_remove("overlap", overlapping);
        FAIL("expected span_out_of_bounds");
    } catch (const error& e) {
        CHECK(e.code() == errc::span_out_of_bounds);
    }
}

TEST_CASE("verify_no_leak over a remove result built from gold is clean") {
    std::string text = "Name: Kanya Rattana\nEmail: kanya@example.com\nbody text";
    auto gold = detect_pii(text);
    REQUIRE(!gold.empty());
    auto result = anonymize_remove(text, gold);
    auto report = verify_no_leak(result, gold);
    CHECK(report.count == 0);
    CHECK(report.surfaces.empty());
}

TEST_CASE("verify_no_leak names a planted miss") {
    std::string text = "Candidate Somchai from Bangkok office";
    PiiSpan missed = span_of(text, "Somchai", PiiCategory::name);
    auto result = anonymize_remove(text, {}); // nothing removed
    auto report = verify_no_leak(result, {missed});
    CHECK(report.count == 1);
    REQUIRE(report.surfaces.size() == 1);
    CHECK(report.surfaces[0] == "Somchai");
    CHECK(verify_no_leak(result, {}).count == 0); // empty gold
}

TEST_CASE("verify_no_leak skips short and stopword surfaces") {
    std::string text = "he is at HQ";
    AnonymizationResult untouched;
    untouched.mode = AnonMode::remove;
    untouched.text = text;
    std::vector<PiiSpan> gold = {{0, 2, PiiCategory::gender_marker, "he"},
                                 {3, 5, PiiCategory::other_personal, "is"}};
    CHECK(verify_no_leak(untouched, gold).count == 0);
}

TEST_CASE("provider backend returns merged spans through the gateway") {
    auto transport = std::make_shared<biasaudit::testing::CannedProviderTransport>();
    auto dir = std::filesystem::temp_directory_path() / "ba_anon_provider";
    std::filesystem::remove_all(dir);
    ProviderProfile profile;
    profile.name = "sonnet";
    profile.endpoint = "http://providers.invalid/v1/chat/completions";
    profile.model_id = "claude-3-5-sonnet";
    GatewayConfig cfg{dir};
    cfg.clock = [] { return 0LL; };
    Gateway gateway({profile}, cfg, transport);

    std::string text = "Name: Kanya Rattana\nEmail: kanya@example.com\nAge: 34";
    auto provider_spans = detect_pii_provider(text, gateway, "sonnet", RunMode::record);
    auto rules_spans = detect_pii(text);
    REQUIRE(provider_spans.size() == rules_spans.size());
    for (size_t i = 0; i < provider_spans.size(); ++i) {
        CHECK(provider_spans[i].start == rules_spans[i].start);
        CHECK(provider_spans[i].end == rules_spans[i].end);
        CHECK(provider_spans[i].category == rules_spans[i].category);
        CHECK(provider_spans[i].surface == rules_spans[i].surface);
    }

    // replay is deterministic and offline
    struct Forbidden : Transport {
        HttpResponse post(const std::string&,
                          const std::vector<std::pair<std::string, std::string>>&,
                          const std::string&) override {
            return {500, "no", {}};
        }
    };
    Gateway replay_gw({profile}, {dir}, std::make_shared<Forbidden>());
    auto replayed = detect_pii_provider(text, replay_gw, "sonnet", RunMode::replay);
    CHECK(replayed.size() == provider_spans.size());
}

TEST_CASE("provider backend failures map to backend_unavailable") {
    struct Failing : Transport {
        HttpResponse post(const std::string&,
                          const std::vector<std::pair<std::string, std::string>>&,
                          const std::string&) override {
            return {503, "down", {}};
        }
    };
    auto dir = std::filesystem::temp_directory_path() / "ba_anon_down";
    std::filesystem::remove_all(dir);
    ProviderProfile profile;
    profile.name = "p";
    profile.endpoint = "http://providers.invalid/v1/chat/completions";
    profile.model_id = "m";
    Gateway gateway({profile}, {dir}, std::make_shared<Failing>());
    try {
        detect_pii_provider("some text", gateway, "p", RunMode::live);
        FAIL("expected backend_unavailable");
    } catch (const error& e) {
        CHECK(e.code() == errc::backend_unavailable);
    }
}

TEST_CASE("provider backend drops junk offsets and unknown categories") {
    struct JunkSpans : Transport {
        HttpResponse post(const std::string&,
                          const std::vector<std::pair<std::string, std::string>>&,
                          const std::string&) override {
            nlohmann::json content = {
                {"spans",
                 nlohmann::json::array(
                     {{{"start", 0}, {"end", 4}, {"category", "name"}},
                      {{"start", 2}, {"end", 3}, {"category", "name"}},     // overlap, narrower
                      {{"start", 90}, {"end", 99}, {"category", "age"}},    // out of bounds
                      {{"start", 5}, {"end", 7}, {"category", "martian"}}})}}; // unknown
            nlohmann::json envelope = {
                {"choices", nlohmann::json::array(
                                {{{"message", {{"content", content.dump()}}}}})}};
            return {200, envelope.dump(), {}};
        }
    };
    auto dir = std::filesystem::temp_directory_path() / "ba_anon_junk";
    std::filesystem::remove_all(dir);
    ProviderProfile profile;
    profile.name = "p";
    profile.endpoint = "http://providers.invalid/v1/chat/completions";
    profile.model_id = "m";
    Gateway gateway({profile}, {dir}, std::make_shared<JunkSpans>());
    auto spans = detect_pii_provider("word soup here", gateway, "p", RunMode::live);
    REQUIRE(spans.size() == 1);
    CHECK(spans[0].start == 0);
    CHECK(spans[0].end == 4);
    CHECK(spans[0].surface == "word");
}

TEST_CASE("pronoun neutralization maps gendered forms case-preservingly") {
    CHECK(neutralize_pronouns("She leads. Her team trusts her decisions; he follows his plan.") ==
          "They leads. Their team trusts their decisions; they follows their plan.");
    CHECK(neutralize_pronouns("Herbert sheds light") == "Herbert sheds light"); // word bounds
}

} // TEST_SUITE
