#include "core/report_gen.hpp"

#include <sstream>

#include "core/errors.hpp"
#include "core/textutil.hpp"

namespace biasaudit {

using nlohmann::json;

const char* cv_mode_name(CvMode m) { return m == CvMode::standard ? "standard" : "anonymized"; }

CvMode cv_mode_from_name(const std::string& name) {
    if (name == "standard") return CvMode::standard;
    if (name == "anonymized") return CvMode::anonymized;
    fail(errc::invalid_argument, "unknown cv mode: " + name);
}

const std::vector<std::string>& report_section_ids() {
    static const std::vector<std::string> kIds = {"overview", "strengths", "weaknesses", "questions",
                                                  "summary"};
    return kIds;
}

std::vector<std::pair<std::string, std::string>> InterviewReport::sections() const {
    auto join = [](const std::vector<std::string>& items) {
        std::string out;
        for (size_t i = 0; i < items.size(); ++i) {
            if (i) out += "\n";
            out += items[i];
        }
        return out;
    };
    std::string questions_text;
    for (size_t i = 0; i < questions.size(); ++i) {
        if (i) questions_text += "\n";
        questions_text += "Q: " + questions[i].question + "\nLook for: " + questions[i].look_for;
    }
    return {{"overview", overview},
            {"strengths", join(strengths)},
            {"weaknesses", join(weaknesses)},
            {"questions", questions_text},
            {"summary", summary}};
}

json InterviewReport::to_json() const {
    json qs = json::array();
    for (const auto& q : questions) qs.push_back({{"question", q.question}, {"look_for", q.look_for}});
    return {{"cv_id", cv_id},       {"mode", cv_mode_name(mode)}, {"model", model},
            {"overview", overview}, {"strengths", strengths},     {"weaknesses", weaknesses},
            {"questions", qs},      {"summary", summary}};
}

InterviewReport InterviewReport::from_json(const json& j) {
    InterviewReport r;
    try {
        r.cv_id = j.value("cv_id", "");
        r.mode = j.contains("mode") ? cv_mode_from_name(j.at("mode").get<std::string>())
                                    : CvMode::standard;
        r.model = j.value("model", "");
        r.overview = j.at("overview").get<std::string>();
        r.strengths = j.at("strengths").get<std::vector<std::string>>();
        r.weaknesses = j.at("weaknesses").get<std::vector<std::string>>();
        for (const auto& q : j.at("questions")) {
            r.questions.push_back(
                {q.at("question").get<std::string>(), q.at("look_for").get<std::string>()});
        }
        r.summary = j.at("summary").get<std::string>();
    } catch (const json::exception& e) {
        fail(errc::invalid_argument, "interview report parse error: " + std::string(e.what()));
    }
    auto require = [](bool ok, const char* what) {
        if (!ok) fail(errc::invalid_argument, std::string("interview report invariant: ") + what);
    };
    require(!trim(r.overview).empty(), "overview non-empty");
    require(!r.strengths.empty(), "strengths non-empty");
    require(!r.weaknesses.empty(), "weaknesses non-empty");
    require(!r.questions.empty(), "questions non-empty");
    require(!trim(r.summary).empty(), "summary non-empty");
    for (const auto& q : r.questions) {
        require(!trim(q.question).empty(), "question text non-empty");
        require(!trim(q.look_for).empty(), "look_for non-empty");
    }
    return r;
}

GenerationRequest build_report_prompt(const std::string& cv_text, const JobDescription& jd,
                                      const ReportPromptSpec& spec,
                                      const std::string& profile_name) {
    GenerationRequest req;
    req.profile_name = profile_name;
    req.schema_id = spec.output_schema_id;

    req.sections.push_back({"role", spec.role_text});
    req.sections.push_back({"task", spec.task_text});
    req.sections.push_back({"tone", spec.tone_text});

    std::ostringstream data;
    data << "Job description:\n```\n" << jd.to_prompt_text() << "```\n\n";
    data << "Candidate CV:\n```\n" << cv_text << "\n```";
    req.sections.push_back({"data", data.str()});

    std::string items;
    for (const auto& item : spec.task_description_items) items += "- " + item + "\n";
    req.sections.push_back({"task_description", items});

    req.sections.push_back({"thought_process", spec.thought_process_text});
    req.sections.push_back(
        {"output_format",
         "Respond with a single JSON object with exactly these fields: overview (string), "
         "strengths (array of strings), weaknesses (array of strings), questions (array of 3 to 10 "
         "objects, each with question and look_for strings), summary (string). No text outside the "
         "JSON object."});
    return req;
}

InterviewReport generate_report(const ReportInput& input, const JobDescription& jd,
                                Gateway& gateway, const std::string& profile_name, RunMode mode,
                                const ReportPromptSpec& spec) {
    if (input.sector != jd.sector) {
        fail(errc::sector_mismatch, "cv '" + input.cv_id + "' sector '" + input.sector +
                                        "' does not match job description sector '" + jd.sector + "'");
    }
    GenerationRequest request = build_report_prompt(input.text, jd, spec, profile_name);
    json doc = gateway.generate_structured(request, mode);

    doc["cv_id"] = input.cv_id;
    doc["mode"] = cv_mode_name(input.mode);
    doc["model"] = profile_name;
    return InterviewReport::from_json(doc);
}

std::string report_file_stem(const std::string& cv_id, CvMode mode, const std::string& model) {
    auto sanitize = [](const std::string& s) {
        std::string out;
        for (char c : s) {
            out.push_back(is_word_char(static_cast<unsigned char>(c)) ? char(std::tolower(c)) : '-');
        }
        return out;
    };
    return "report_" + sanitize(cv_id) + "_" + cv_mode_name(mode) + "_" + sanitize(model);
}

} // namespace biasaudit
