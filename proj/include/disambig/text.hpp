#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace disambig::text {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

// Lowercase, replace punctuation with spaces and collapse whitespace.
std::string normalize(std::string_view s);

// True when `needle` occurs in `haystack` on word boundaries. Both inputs
// are expected to be normalized already.
bool contains_phrase(std::string_view haystack, std::string_view needle);

// Byte offsets of every word-boundary occurrence of `needle` in `haystack`.
std::vector<std::size_t> find_phrase(std::string_view haystack, std::string_view needle);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

// "a", "a or b", "a, b, or c"
std::string join_choices(const std::vector<std::string>& parts);

bool iequals(std::string_view a, std::string_view b);

}  // namespace disambig::text
