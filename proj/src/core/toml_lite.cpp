#include "core/toml_lite.hpp"

#include <sstream>

#include "core/errors.hpp"
#include "core/textutil.hpp"

namespace biasaudit {

using nlohmann::json;

namespace {

struct Parser {
    const std::string& content;
    size_t line_no = 0;

    [[noreturn]] void bail(const std::string& msg) const {
        fail(errc::config, "config line " + std::to_string(line_no) + ": " + msg);
    }

    // bare or quoted keys
    std::string unquote_key(const std::string& key) const {
        if (key.size() >= 2 && key.front() == '"' && key.back() == '"') {
            return parse_value(key).get<std::string>();
        }
        return key;
    }

    // value parsing over a single line tail
    json parse_value(std::string_view v) const {
        std::string s = trim(v);
        if (s.empty()) bail("missing value");
        if (s.front() == '"') {
            size_t i = 1;
            std::string out;
            bool closed = false;
            while (i < s.size()) {
                char c = s[i];
                if (c == '\\' && i + 1 < s.size()) {
                    char n = s[i + 1];
                    if (n == 'n') out.push_back('\n');
                    else if (n == 't') out.push_back('\t');
                    else out.push_back(n);
                    i += 2;
                    continue;
                }
                if (c == '"') {
                    closed = true;
                    if (!trim(s.substr(i + 1)).empty()) bail("trailing characters after string");
                    break;
                }
                out.push_back(c);
                ++i;
            }
            if (!closed) bail("unterminated string");
            return out;
        }
        if (s == "true") return true;
        if (s == "false") return false;
        if (s.front() == '[') {
            if (s.back() != ']') bail("unterminated array");
            json arr = json::array();
            std::string inner = s.substr(1, s.size() - 2);
            for (const auto& part : split_top_level(inner)) {
                if (!trim(part).empty()) arr.push_back(parse_value(part));
            }
            return arr;
        }
        if (s.front() == '{') {
            if (s.back() != '}') bail("unterminated inline table");
            json obj = json::object();
            std::string inner = s.substr(1, s.size() - 2);
            for (const auto& part : split_top_level(inner)) {
                std::string kv = trim(part);
                if (kv.empty()) continue;
                size_t eq = find_top_level_eq(kv);
                if (eq == std::string::npos) bail("inline table entry needs key = value");
                obj[unquote_key(trim(kv.substr(0, eq)))] = parse_value(kv.substr(eq + 1));
            }
            return obj;
        }
        // number
        try {
            if (s.find('.') != std::string::npos || s.find('e') != std::string::npos ||
                s.find('E') != std::string::npos) {
                size_t used = 0;
                double d = std::stod(s, &used);
                if (used != s.size()) bail("malformed number: " + s);
                return d;
            }
            size_t used = 0;
            long long n = std::stoll(s, &used, 10);
            if (used != s.size()) bail("malformed number: " + s);
            return n;
        } catch (const std::exception&) {
            bail("unrecognized value: " + s);
        }
    }

    // split on commas that are not nested in strings/brackets
    std::vector<std::string> split_top_level(const std::string& s) const {
        std::vector<std::string> out;
        std::string current;
        int depth = 0;
        bool in_string = false;
        for (size_t i = 0; i < s.size(); ++i) {
            char c = s[i];
            if (in_string) {
                current.push_back(c);
                if (c == '\\' && i + 1 < s.size()) {
                    current.push_back(s[++i]);
                } else if (c == '"') {
                    in_string = false;
                }
                continue;
            }
            if (c == '"') {
                in_string = true;
                current.push_back(c);
            } else if (c == '[' || c == '{') {
                ++depth;
                current.push_back(c);
            } else if (c == ']' || c == '}') {
                --depth;
                current.push_back(c);
            } else if (c == ',' && depth == 0) {
                out.push_back(current);
                current.clear();
            } else {
                current.push_back(c);
            }
        }
        out.push_back(current);
        return out;
    }

    size_t find_top_level_eq(const std::string& s) const {
        bool in_string = false;
        for (size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '"') in_string = !in_string;
            if (s[i] == '=' && !in_string) return i;
        }
        return std::string::npos;
    }

    std::string strip_comment(const std::string& line) const {
        bool in_string = false;
        for (size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') in_string = !in_string;
            if (line[i] == '#' && !in_string) return line.substr(0, i);
        }
        return line;
    }
};

json* resolve_path(json& root, const std::string& dotted, bool array_table,
                   const Parser& parser) {
    std::vector<std::string> parts;
    std::string current;
    for (char c : dotted) {
        if (c == '.') {
            parts.push_back(trim(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    parts.push_back(trim(current));

    json* node = &root;
    for (size_t i = 0; i < parts.size(); ++i) {
        const std::string& part = parts[i];
        if (part.empty()) parser.bail("empty table name component");
        bool last = i + 1 == parts.size();
        if (last && array_table) {
            if (!node->contains(part)) (*node)[part] = json::array();
            if (!(*node)[part].is_array()) parser.bail("'" + part + "' is not an array of tables");
            (*node)[part].push_back(json::object());
            return &(*node)[part].back();
        }
        if (!node->contains(part)) (*node)[part] = json::object();
        node = &(*node)[part];
        if (node->is_array()) node = &node->back(); // nested keys extend the latest entry
    }
    return node;
}

} // namespace

json parse_toml_lite(const std::string& content) {
    json root = json::object();
    json* current = &root;
    Parser parser{content};

    std::istringstream in(content);
    std::string raw;
    while (std::getline(in, raw)) {
        ++parser.line_no;
        std::string line = trim(parser.strip_comment(raw));
        if (line.empty()) continue;

        if (line.front() == '[') {
            bool array_table = line.size() > 1 && line[1] == '[';
            size_t open = array_table ? 2 : 1;
            std::string closer = array_table ? "]]" : "]";
            size_t close = line.find(closer, open);
            if (close == std::string::npos || !trim(line.substr(close + closer.size())).empty()) {
                parser.bail("malformed table header");
            }
            current = resolve_path(root, line.substr(open, close - open), array_table, parser);
            continue;
        }

        size_t eq = parser.find_top_level_eq(line);
        if (eq == std::string::npos) parser.bail("expected key = value");
        std::string key = parser.unquote_key(trim(line.substr(0, eq)));
        if (key.empty()) parser.bail("empty key");
        (*current)[key] = parser.parse_value(line.substr(eq + 1));
    }
    return root;
}

} // namespace biasaudit
