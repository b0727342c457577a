#include "core/jsonschema.hpp"

#include "core/errors.hpp"

namespace biasaudit {

using nlohmann::json;

namespace {

void validate_node(const json& schema, const json& doc, const std::string& path,
                   std::vector<std::string>& out) {
    const std::string type = schema.value("type", "");
    auto bad = [&](const std::string& what) { out.push_back(path + ": " + what); };

    if (type == "object") {
        if (!doc.is_object()) {
            bad("expected object");
            return;
        }
        if (schema.contains("required")) {
            for (const auto& req : schema.at("required")) {
                if (!doc.contains(req.get<std::string>())) {
                    bad("missing required field '" + req.get<std::string>() + "'");
                }
            }
        }
        if (schema.contains("properties")) {
            for (auto it = schema.at("properties").begin(); it != schema.at("properties").end(); ++it) {
                if (doc.contains(it.key())) {
                    validate_node(it.value(), doc.at(it.key()), path + "." + it.key(), out);
                }
            }
        }
    } else if (type == "string") {
        if (!doc.is_string()) {
            bad("expected string");
            return;
        }
        if (schema.value("non_empty", false)) {
            const auto& s = doc.get_ref<const std::string&>();
            bool blank = true;
            for (char c : s) {
                if (c != ' ' && c != '\t' && c != '\n' && c != '\r') {
                    blank = false;
                    break;
                }
            }
            if (blank) bad("expected non-empty string");
        }
    } else if (type == "integer") {
        // accept exact-valued floats some providers emit (2.0 for 2)
        bool ok = doc.is_number_integer() || doc.is_number_unsigned();
        if (!ok && doc.is_number_float()) {
            double v = doc.get<double>();
            ok = v == double(static_cast<long long>(v));
        }
        if (!ok) {
            bad("expected integer");
            return;
        }
        long long v = doc.is_number_float() ? (long long)doc.get<double>() : doc.get<long long>();
        if (schema.contains("minimum") && v < schema.at("minimum").get<long long>()) bad("below minimum");
        if (schema.contains("maximum") && v > schema.at("maximum").get<long long>()) bad("above maximum");
    } else if (type == "number") {
        if (!doc.is_number()) bad("expected number");
    } else if (type == "boolean") {
        if (!doc.is_boolean()) bad("expected boolean");
    } else if (type == "array") {
        if (!doc.is_array()) {
            bad("expected array");
            return;
        }
        size_t n = doc.size();
        if (schema.contains("min_items") && n < schema.at("min_items").get<size_t>()) bad("too few items");
        if (schema.contains("max_items") && n > schema.at("max_items").get<size_t>()) bad("too many items");
        if (schema.contains("items")) {
            for (size_t i = 0; i < n; ++i) {
                validate_node(schema.at("items"), doc.at(i), path + "[" + std::to_string(i) + "]", out);
            }
        }
    } else {
        bad("schema node missing type");
    }
}

json bias_scores_schema(bool with_reasoning) {
    static const char* kTypes[] = {"gender",        "racial_ethnic", "cultural", "socioeconomic",
                                   "age",           "disability",    "religious", "political"};
    json props = json::object();
    json required = json::array();
    for (const char* t : kTypes) {
        required.push_back(t);
        if (with_reasoning) {
            props[t] = {{"type", "object"},
                        {"required", {"level", "reasoning"}},
                        {"properties",
                         {{"level", {{"type", "integer"}, {"minimum", 0}, {"maximum", 2}}},
                          {"reasoning", {{"type", "string"}}}}}};
        } else {
            props[t] = {{"type", "integer"}, {"minimum", 0}, {"maximum", 2}};
        }
    }
    return {{"type", "object"}, {"required", required}, {"properties", props}};
}

} // namespace

std::vector<std::string> validate_against_schema(const json& schema, const json& doc) {
    std::vector<std::string> out;
    validate_node(schema, doc, "$", out);
    return out;
}

SchemaRegistry::SchemaRegistry() {
    json question = {{"type", "object"},
                     {"required", {"question", "look_for"}},
                     {"properties",
                      {{"question", {{"type", "string"}, {"non_empty", true}}},
                       {"look_for", {{"type", "string"}, {"non_empty", true}}}}}};
    json report = {
        {"type", "object"},
        {"required", {"overview", "strengths", "weaknesses", "questions", "summary"}},
        {"properties",
         {{"overview", {{"type", "string"}, {"non_empty", true}}},
          {"strengths",
           {{"type", "array"}, {"min_items", 1}, {"items", {{"type", "string"}, {"non_empty", true}}}}},
          {"weaknesses",
           {{"type", "array"}, {"min_items", 1}, {"items", {{"type", "string"}, {"non_empty", true}}}}},
          {"questions", {{"type", "array"}, {"min_items", 3}, {"max_items", 10}, {"items", question}}},
          {"summary", {{"type", "string"}, {"non_empty", true}}}}}};
    register_schema("interview_report", report);
    register_schema("bias_scores", bias_scores_schema(false));
    register_schema("bias_scores_reasoned", bias_scores_schema(true));

    json span = {{"type", "object"},
                 {"required", {"start", "end", "category"}},
                 {"properties",
                  {{"start", {{"type", "integer"}, {"minimum", 0}}},
                   {"end", {{"type", "integer"}, {"minimum", 0}}},
                   {"category", {{"type", "string"}, {"non_empty", true}}}}}};
    register_schema("pii_spans",
                    {{"type", "object"},
                     {"required", {"spans"}},
                     {"properties", {{"spans", {{"type", "array"}, {"items", span}}}}}});
}

void SchemaRegistry::register_schema(const std::string& id, json schema) {
    schemas_[id] = std::move(schema);
}

bool SchemaRegistry::has(const std::string& id) const { return schemas_.count(id) != 0; }

const json& SchemaRegistry::get(const std::string& id) const {
    auto it = schemas_.find(id);
    if (it == schemas_.end()) fail(errc::config, "unknown schema id: " + id);
    return it->second;
}

std::vector<std::string> SchemaRegistry::validate(const std::string& id, const json& doc) const {
    return validate_against_schema(get(id), doc);
}

json lenient_parse_json(const std::string& text) {
    json doc = json::parse(text, nullptr, false);
    if (!doc.is_discarded()) return doc;
    // strip prose / markdown fences: take the outermost braces
    size_t b = text.find('{');
    size_t e = text.rfind('}');
    if (b != std::string::npos && e != std::string::npos && e > b) {
        doc = json::parse(text.substr(b, e - b + 1), nullptr, false);
    }
    return doc;
}

} // namespace biasaudit
