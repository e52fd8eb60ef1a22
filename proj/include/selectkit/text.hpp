#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace selectkit {

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);

// Lowercase, trim, and collapse internal whitespace runs to one space.
std::string normalize_name(std::string_view s);

// Tokenizer contract shared by every scorer: ASCII-lowercase, split on
// whitespace and ASCII punctuation, drop empty pieces. Bytes >= 0x80 are
// kept as word characters so UTF-8 names stay intact.
std::vector<std::string> tokenize(std::string_view text);

// Byte offsets of case-insensitive, word-bounded occurrences of `needle`
// in `haystack`. A boundary is string start/end or a non-alphanumeric
// ASCII byte.
std::vector<std::size_t> find_word_occurrences(std::string_view haystack,
                                               std::string_view needle);

bool contains_word(std::string_view haystack, std::string_view needle);

std::string replace_all(std::string s, std::string_view from, std::string_view to);

std::size_t count_occurrences(std::string_view s, std::string_view needle);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace selectkit
