#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "core/corpus.hpp"
#include "core/gateway.hpp"

namespace biasaudit {

enum class CvMode { standard, anonymized };
const char* cv_mode_name(CvMode m);
CvMode cv_mode_from_name(const std::string& name);

// Fixed section order used everywhere downstream.
const std::vector<std::string>& report_section_ids(); // overview..summary

struct InterviewQuestion {
    std::string question;
    std::string look_for;
};

struct InterviewReport {
    std::string cv_id;
    CvMode mode = CvMode::standard;
    std::string model;
    std::string overview;
    std::vector<std::string> strengths;
    std::vector<std::string> weaknesses;
    std::vector<InterviewQuestion> questions;
    std::string summary;

    // (section id, section text) in fixed order; list sections join their
    // items with newlines so every stored field appears in the output.
    std::vector<std::pair<std::string, std::string>> sections() const;

    nlohmann::json to_json() const;
    // Validates the report invariants (five non-empty sections, each
    // question paired with a non-empty look_for).
    static InterviewReport from_json(const nlohmann::json& j);
};

struct ReportPromptSpec {
    std::string role_text = "You are a helpful and expert hiring assistant for the HR department.";
    std::string task_text = "Analyze candidate CV for a job and generate interview questions.";
    std::string tone_text = "Professional tone, very critical, concise, and avoids repetition";
    std::vector<std::string> task_description_items = {
        "Analyze the candidate's strengths and weaknesses",
        "Prepare interview questions and what to look for in the answer",
        "The result will contain only these fields: overview information, strengths/weaknesses, "
        "interview questions and what to look for in the answers, and summary.",
    };
    std::string thought_process_text = "Go through each task step by step";
    std::string output_schema_id = "interview_report";
};

// Sections ordered exactly: role, task, tone, data (JD then CV, each fenced
// and labeled), task description, thought process, output format. Pure
// function of its inputs.
GenerationRequest build_report_prompt(const std::string& cv_text, const JobDescription& jd,
                                      const ReportPromptSpec& spec,
                                      const std::string& profile_name);

struct ReportInput {
    std::string cv_id;
    std::string text;
    std::string sector;
    CvMode mode = CvMode::standard;
};

InterviewReport generate_report(const ReportInput& input, const JobDescription& jd,
                                Gateway& gateway, const std::string& profile_name, RunMode mode,
                                const ReportPromptSpec& spec = {});

// File name stem embedding (cv id, mode, model): report_<cv>_<mode>_<model>
std::string report_file_stem(const std::string& cv_id, CvMode mode, const std::string& model);

} // namespace biasaudit
