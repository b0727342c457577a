#pragma once

#include <string>

#include <json.hpp>

namespace biasaudit {

// Parses the TOML subset the run config uses into a JSON tree: [section],
// [[array.of.tables]], key = "string" | number | true/false | [array] |
// { inline = "table" }, and # comments. Throws config errors with line
// numbers on anything malformed.
nlohmann::json parse_toml_lite(const std::string& content);

} // namespace biasaudit
