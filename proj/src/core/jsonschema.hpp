#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace biasaudit {

// Structural validation: required fields, types, bounds, non-empty strings.
// Deliberately not full JSON Schema; providers without constrained decoding
// get checked on our side, and failures feed the gateway retry loop.
//
// Schema description (itself JSON):
//   {"type":"object", "required":["a"], "properties":{"a":{...}}}
//   {"type":"string", "non_empty":true}
//   {"type":"integer", "minimum":0, "maximum":2}
//   {"type":"number"} / {"type":"boolean"}
//   {"type":"array", "min_items":1, "max_items":10, "items":{...}}
// Unknown object members are allowed.
std::vector<std::string> validate_against_schema(const nlohmann::json& schema,
                                                 const nlohmann::json& doc);

class SchemaRegistry {
public:
    // Registers the built-in schemas (interview_report, bias_scores,
    // bias_scores_reasoned, pii_spans).
    SchemaRegistry();

    void register_schema(const std::string& id, nlohmann::json schema);
    bool has(const std::string& id) const;
    const nlohmann::json& get(const std::string& id) const; // throws config error if unknown

    std::vector<std::string> validate(const std::string& id, const nlohmann::json& doc) const;

private:
    std::map<std::string, nlohmann::json> schemas_;
};

// Parses provider output into JSON, tolerating surrounding prose or markdown
// fences; returns discarded json on failure (doc.is_discarded()).
nlohmann::json lenient_parse_json(const std::string& text);

} // namespace biasaudit
