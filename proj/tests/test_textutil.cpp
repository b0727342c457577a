#include <doctest.h>

#include "core/textutil.hpp"

using namespace biasaudit;

TEST_SUITE("textutil") {

TEST_CASE("word tokens lowercase and split on punctuation") {
    auto tokens = word_tokens("Machine learning, pipelines; neural-networks!");
    CHECK(tokens == std::vector<std::string>{"machine", "learning", "pipelines", "neural",
                                             "networks"});
}

TEST_CASE("approx token count counts words and punctuation units") {
    // 3 words + comma + period = 5 units; chars fallback smaller
    CHECK(approx_token_count("one two, three.") == 5);
    CHECK(approx_token_count("") == 0);
}

TEST_CASE("approx token count falls back to chars-per-token for unsegmented input") {
    std::string blob(100, 'x'); // one run, 100 chars
    CHECK(approx_token_count(blob, 4.0) == 25);
    CHECK(approx_token_count(blob, 0.0) == 1); // fallback disabled
}

TEST_CASE("sentence segmentation splits on terminal punctuation before uppercase") {
    auto s = segment_sentences("First point here. Second point there. and this stays attached.");
    REQUIRE(s.size() == 2);
    CHECK(s[0] == "First point here.");
    CHECK(s[1] == "Second point there. and this stays attached.");
}

TEST_CASE("sentence segmentation preserves list items") {
    auto s = segment_sentences("Strengths include:\n- strong writing\n- careful review\nDone.");
    REQUIRE(s.size() == 3);
    CHECK(s[0] == "Strengths include:");
    CHECK(s[1] == "- strong writing");
    CHECK(s[2] == "- careful review\nDone.");
}

TEST_CASE("segmentation is deterministic") {
    std::string text = "Alpha beta. Gamma delta! Epsilon?\n1. item one\n2. item two";
    CHECK(segment_sentences(text) == segment_sentences(text));
}

TEST_CASE("paragraph chunks concatenate back to the document") {
    std::string doc = "para one line.\n\npara two is a bit longer here.\n\n\npara three.";
    for (size_t budget : {1, 5, 50, 1000}) {
        auto chunks = chunk_paragraphs(doc, budget);
        std::string joined;
        for (const auto& c : chunks) joined += c;
        CHECK(joined == doc);
    }
    CHECK(chunk_paragraphs(doc, 1000).size() == 1);
    CHECK(chunk_paragraphs(doc, 1).size() == 3);
}

} // TEST_SUITE
