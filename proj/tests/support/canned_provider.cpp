#include "support/canned_provider.hpp"

#include <regex>
#include <vector>

#include <json.hpp>

#include "core/anonymizer.hpp"
#include "core/textutil.hpp"

namespace biasaudit::testing {

using nlohmann::json;

namespace {

size_t count_any(const std::string& lower_text, const std::vector<std::string>& words) {
    size_t count = 0;
    auto tokens = word_tokens(lower_text);
    for (const auto& token : tokens) {
        for (const auto& word : words) {
            if (token == word) {
                ++count;
                break;
            }
        }
    }
    return count;
}

const std::vector<std::string>& female_words() {
    static const std::vector<std::string> kWords = {"she", "her", "hers", "ms", "mrs", "female",
                                                    "woman"};
    return kWords;
}
const std::vector<std::string>& male_words() {
    static const std::vector<std::string> kWords = {"he", "him", "his", "mr", "male", "man"};
    return kWords;
}
const std::vector<std::string>& nationality_words() {
    static const std::vector<std::string> kWords = {"thai",     "german", "japanese", "brazilian",
                                                    "nigerian", "polish", "korean",   "canadian"};
    return kWords;
}

std::string extract_between(const std::string& text, const std::string& begin,
                            const std::string& end) {
    size_t b = text.find(begin);
    if (b == std::string::npos) return "";
    b += begin.size();
    size_t e = text.find(end, b);
    if (e == std::string::npos) return text.substr(b);
    return text.substr(b, e - b);
}

json score_rubric(const std::string& section_lower) {
    json scores = json::object();
    size_t gendered = count_any(section_lower, female_words()) +
                      count_any(section_lower, male_words());
    scores["gender"] = gendered >= 2 ? 2 : gendered == 1 ? 1 : 0;
    scores["racial_ethnic"] = count_any(section_lower, nationality_words()) > 0 ? 2 : 0;
    int age = 0;
    if (section_lower.find("year-old") != std::string::npos) age = 2;
    else if (section_lower.find("years of experience") != std::string::npos ||
             section_lower.find("recent graduate") != std::string::npos) age = 1;
    scores["age"] = age;
    int cultural = 0;
    if (section_lower.find("western-centric") != std::string::npos) cultural = 2;
    else if (section_lower.find("cultur") != std::string::npos ||
             section_lower.find("western") != std::string::npos) cultural = 1;
    scores["cultural"] = cultural;
    int socio = 0;
    if (section_lower.find("prestigious") != std::string::npos ||
        section_lower.find("elite") != std::string::npos) socio = 1;
    scores["socioeconomic"] = socio;
    scores["disability"] = section_lower.find("disabilit") != std::string::npos ? 1 : 0;
    scores["religious"] = section_lower.find("religio") != std::string::npos ? 1 : 0;
    scores["political"] = section_lower.find("politic") != std::string::npos ? 1 : 0;
    return scores;
}

// fixed reasoning strings keep recorded fixtures stable
std::string reasoning_for(const std::string& type, int level) {
    if (level == 0) return "No significant " + type + " bias detected.";
    if (level == 1) return "Subtle " + type + " signals present in the wording.";
    return "Clear " + type + " bias in how the subject is described.";
}

json climate_audit_response() {
    auto entry = [](int level, const std::string& reasoning) {
        return json{{"level", level}, {"reasoning", reasoning}};
    };
    return json{
        {"gender", entry(0, "No significant gender bias detected.")},
        {"racial_ethnic",
         entry(1, "Framing of developing regions leans on familiar victim stereotypes.")},
        {"cultural",
         entry(2, "Relies on a Western-centric perspective with little room for non-Western "
                  "viewpoints.")},
        {"socioeconomic",
         entry(2, "Centers high-profile voices while grassroots perspectives stay out of frame.")},
        {"age", entry(1, "Calling out a speaker's age invites age-related stereotyping.")},
        {"disability", entry(0, "No significant disability bias detected.")},
        {"religious", entry(0, "No significant religious bias detected.")},
        {"political",
         entry(1, "Coverage tilts toward one side of the policy debate.")},
    };
}

json build_report(const std::string& prompt) {
    std::string cv = extract_between(prompt, "Candidate CV:\n```\n", "\n```");
    std::string cv_lower = to_lower_ascii(cv);
    std::string title = trim(extract_between(prompt, "Job title: ", "\n"));
    if (title.empty()) title = "the advertised role";

    bool female = count_any(cv_lower, female_words()) > 0;
    bool male = !female && count_any(cv_lower, male_words()) > 0;
    std::string subject = female ? "She" : male ? "He" : "The candidate";
    std::string possessive = female ? "Her" : male ? "His" : "Their";

    std::string nationality;
    for (const auto& word : nationality_words()) {
        if (count_any(cv_lower, {word}) > 0) {
            nationality = std::string(1, char(std::toupper(word[0]))) + word.substr(1);
            break;
        }
    }

    std::string experience;
    std::smatch m;
    static const std::regex kExp(R"(([0-9]+\+? years of experience))");
    if (std::regex_search(cv, m, kExp)) experience = m.str(1);

    std::string overview = subject + " is applying for " + title + ". ";
    if (!nationality.empty()) {
        overview += subject + " is a " + nationality + " professional. ";
    }
    if (!experience.empty()) {
        overview += possessive + " background shows " + experience + ". ";
    }
    overview += possessive + " materials are organized and relevant to the role.";

    json strengths = json::array({
        subject + " presents concrete, verifiable accomplishments.",
        possessive + " skills align closely with the stated requirements.",
    });
    json weaknesses = json::array({
        subject + " lacks documented certification for some required tools.",
        "There is a risk of falling behind on the less familiar responsibilities.",
    });
    json questions = json::array({
        json{{"question", "Walk through a recent project you led end to end."},
             {"look_for", "Ownership of outcomes and honest treatment of setbacks."}},
        json{{"question", "How do you prioritize when two deadlines collide?"},
             {"look_for", "A concrete method rather than generalities."}},
        json{{"question", "What would you need in the first 90 days to succeed?"},
             {"look_for", "Realistic asks tied to the role description."}},
    });
    std::string summary = subject + " is a credible fit for " + title +
                          " with clear strengths and a few gaps worth probing in the interview.";

    return json{{"overview", overview},
                {"strengths", strengths},
                {"weaknesses", weaknesses},
                {"questions", questions},
                {"summary", summary}};
}

json classify_inputs(const std::string& url, const json& inputs) {
    json out = json::array();
    const bool wu_style = url.find("wu") != std::string::npos;
    const bool distortion = url.find("cognitive") != std::string::npos ||
                            url.find("distortion") != std::string::npos;
    for (const auto& input : inputs) {
        std::string lower = to_lower_ascii(input.get<std::string>());
        if (distortion) {
            std::string label = "No Distortion";
            if (lower.find("lacks") != std::string::npos || lower.find("weak") != std::string::npos) {
                label = "Labeling";
            } else if (lower.find("risk") != std::string::npos ||
                       lower.find("jeopard") != std::string::npos) {
                label = "Catastrophizing";
            } else if (lower.find("should") != std::string::npos) {
                label = "Should Statements";
            } else if (lower.find("deserve") != std::string::npos ||
                       lower.find("recognition") != std::string::npos) {
                label = "Reward Fallacy";
            } else if (lower.find("personally responsible") != std::string::npos ||
                       lower.find("blame") != std::string::npos) {
                label = "Personalization";
            }
            out.push_back({{"label", label}, {"score", 0.9}});
        } else {
            bool biased = count_any(lower, female_words()) + count_any(lower, male_words()) > 0 ||
                          count_any(lower, nationality_words()) > 0;
            if (wu_style) {
                out.push_back({{"label", biased ? "LABEL_1" : "LABEL_0"}, {"score", 0.85}});
            } else {
                out.push_back({{"label", biased ? "Biased" : "Non-biased"}, {"score", 0.9}});
            }
        }
    }
    return out;
}

} // namespace

HttpResponse CannedProviderTransport::post(
    const std::string& url, const std::vector<std::pair<std::string, std::string>>& headers,
    const std::string& body) {
    (void)headers;
    ++calls;

    json request = json::parse(body, nullptr, false);
    HttpResponse resp;
    resp.status = 200;

    if (request.is_object() && request.contains("inputs")) {
        resp.body = classify_inputs(url, request.at("inputs")).dump();
        return resp;
    }

    std::string prompt;
    if (request.is_object() && request.contains("messages")) {
        prompt = request.at("messages").at(0).at("content").get<std::string>();
    }
    std::string lower = to_lower_ascii(prompt);

    json content;
    if (prompt.find("overview (string)") != std::string::npos) {
        content = build_report(prompt);
    } else if (prompt.find("\"spans\":") != std::string::npos) {
        std::string document = extract_between(prompt, "Document:\n```\n", "\n```");
        json spans = json::array();
        for (const auto& span : detect_pii(document)) {
            spans.push_back({{"start", span.start},
                             {"end", span.end},
                             {"category", pii_category_name(span.category)}});
        }
        content = json{{"spans", spans}};
    } else {
        const bool reasoned = prompt.find("field reasoning") != std::string::npos;
        std::string section = extract_between(prompt, "Report section:\n```\n", "\n```");
        if (reasoned && section.find("Climate Forward Forum") != std::string::npos) {
            content = climate_audit_response();
        } else {
            json scores = score_rubric(to_lower_ascii(section));
            if (reasoned) {
                content = json::object();
                for (auto it = scores.begin(); it != scores.end(); ++it) {
                    content[it.key()] = {{"level", it.value()},
                                         {"reasoning", reasoning_for(it.key(), it.value())}};
                }
            } else {
                content = scores;
            }
        }
    }

    json envelope = {{"choices", json::array({json{{"message", json{{"content", content.dump()}}}}})},
                     {"usage", {{"prompt_tokens", 100}, {"completion_tokens", 80}}}};
    resp.body = envelope.dump();
    return resp;
}

} // namespace biasaudit::testing
