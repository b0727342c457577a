#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace biasaudit {

std::string to_lower_ascii(std::string_view s);
std::string trim(std::string_view s);

inline bool is_word_char(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

// Lowercased word tokens (maximal alnum runs); punctuation and whitespace
// act as separators.
std::vector<std::string> word_tokens(std::string_view text);

// Number of whitespace-separated words.
size_t word_count(std::string_view text);

// Screening token approximation: word runs and individual punctuation marks
// each count as one token. When chars_per_token > 0 the count is floored at
// ceil(non-whitespace chars / chars_per_token) so unsegmented scripts still
// register.
size_t approx_token_count(std::string_view text, double chars_per_token = 4.0);

// Sentence segmentation for sentence-level classifiers. Splits after
// terminal punctuation followed by whitespace and an uppercase letter or a
// bullet marker; a line that starts with a bullet marker always opens a new
// sentence, so list items survive as standalone sentences. Deterministic.
std::vector<std::string> segment_sentences(std::string_view text);

// Paragraph-boundary chunking under a token budget. Concatenating the
// returned chunks reproduces `text` byte-exactly; a lone paragraph larger
// than the budget becomes its own chunk.
std::vector<std::string> chunk_paragraphs(std::string_view text, size_t max_tokens,
                                          double chars_per_token = 4.0);

} // namespace biasaudit
