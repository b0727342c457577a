#include "core/textutil.hpp"

#include <cctype>
#include <cmath>

namespace biasaudit {

std::string to_lower_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = char(c - 'A' + 'a');
    }
    return out;
}

std::string trim(std::string_view s) {
    size_t b = 0;
    size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> word_tokens(std::string_view text) {
    std::vector<std::string> out;
    size_t i = 0;
    while (i < text.size()) {
        if (!is_word_char(static_cast<unsigned char>(text[i]))) {
            ++i;
            continue;
        }
        size_t j = i;
        while (j < text.size() && is_word_char(static_cast<unsigned char>(text[j]))) ++j;
        out.push_back(to_lower_ascii(text.substr(i, j - i)));
        i = j;
    }
    return out;
}

size_t word_count(std::string_view text) {
    size_t n = 0;
    bool in_word = false;
    for (char c : text) {
        bool ws = std::isspace(static_cast<unsigned char>(c)) != 0;
        if (!ws && !in_word) ++n;
        in_word = !ws;
    }
    return n;
}

size_t approx_token_count(std::string_view text, double chars_per_token) {
    size_t units = 0;
    size_t non_ws = 0;
    size_t i = 0;
    while (i < text.size()) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (std::isspace(c)) {
            ++i;
            continue;
        }
        ++non_ws;
        if (is_word_char(c)) {
            size_t j = i + 1;
            while (j < text.size() && is_word_char(static_cast<unsigned char>(text[j]))) {
                ++non_ws;
                ++j;
            }
            i = j;
        } else {
            ++i;
        }
        ++units;
    }
    if (chars_per_token > 0.0) {
        size_t floor_count = size_t(std::ceil(double(non_ws) / chars_per_token));
        if (floor_count > units) units = floor_count;
    }
    return units;
}

namespace {

bool is_bullet_start(std::string_view text, size_t pos) {
    if (pos >= text.size()) return false;
    char c = text[pos];
    if (c == '-' || c == '*' || c == '+') {
        return pos + 1 < text.size() && (text[pos + 1] == ' ' || text[pos + 1] == '\t');
    }
    // numbered items: "3. " or "3) "
    if (c >= '0' && c <= '9') {
        size_t j = pos;
        while (j < text.size() && text[j] >= '0' && text[j] <= '9') ++j;
        if (j < text.size() && (text[j] == '.' || text[j] == ')')) {
            return j + 1 < text.size() && (text[j + 1] == ' ' || text[j + 1] == '\t');
        }
    }
    return false;
}

bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }

} // namespace

std::vector<std::string> segment_sentences(std::string_view text) {
    std::vector<std::string> out;
    std::vector<size_t> breaks; // positions where a new sentence starts

    size_t i = 0;
    while (i < text.size()) {
        if (is_terminal(text[i])) {
            size_t j = i + 1;
            while (j < text.size() && (text[j] == '"' || text[j] == '\'' || text[j] == ')' || text[j] == ']')) ++j;
            size_t k = j;
            while (k < text.size() && std::isspace(static_cast<unsigned char>(text[k]))) ++k;
            bool had_ws = k > j;
            if (had_ws && k < text.size() &&
                ((text[k] >= 'A' && text[k] <= 'Z') || is_bullet_start(text, k))) {
                breaks.push_back(k);
                i = k;
                continue;
            }
        }
        if (text[i] == '\n') {
            size_t k = i + 1;
            while (k < text.size() && (text[k] == ' ' || text[k] == '\t' || text[k] == '\n')) ++k;
            if (is_bullet_start(text, k)) {
                breaks.push_back(k);
                i = k;
                continue;
            }
        }
        ++i;
    }

    size_t start = 0;
    auto push = [&](size_t b, size_t e) {
        std::string s = trim(text.substr(b, e - b));
        if (!s.empty()) out.push_back(std::move(s));
    };
    for (size_t b : breaks) {
        push(start, b);
        start = b;
    }
    push(start, text.size());
    return out;
}

std::vector<std::string> chunk_paragraphs(std::string_view text, size_t max_tokens,
                                          double chars_per_token) {
    // paragraphs keep their trailing separators so concatenation is lossless
    std::vector<std::string_view> paras;
    size_t i = 0;
    while (i < text.size()) {
        size_t sep = text.find("\n\n", i);
        if (sep == std::string_view::npos) {
            paras.push_back(text.substr(i));
            break;
        }
        size_t end = sep;
        while (end < text.size() && text[end] == '\n') ++end;
        paras.push_back(text.substr(i, end - i));
        i = end;
    }

    std::vector<std::string> chunks;
    std::string current;
    size_t current_tokens = 0;
    for (std::string_view p : paras) {
        size_t t = approx_token_count(p, chars_per_token);
        if (!current.empty() && current_tokens + t > max_tokens) {
            chunks.push_back(std::move(current));
            current.clear();
            current_tokens = 0;
        }
        current.append(p);
        current_tokens += t;
    }
    if (!current.empty()) chunks.push_back(std::move(current));
    return chunks;
}

} // namespace biasaudit
