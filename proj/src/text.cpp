#include "disambig/text.hpp"

#include <algorithm>
#include <cctype>

namespace disambig::text {

std::string trim(std::string_view s) {
  auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string normalize(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (unsigned char c : s) {
    // Bytes >= 0x80 belong to UTF-8 sequences (curly quotes and the like);
    // they are treated as separators.
    if (c < 0x80 && std::isalnum(c)) {
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      out.push_back(static_cast<char>(std::tolower(c)));
    } else {
      pending_space = true;
    }
  }
  return out;
}

std::vector<std::size_t> find_phrase(std::string_view haystack, std::string_view needle) {
  std::vector<std::size_t> hits;
  if (needle.empty()) return hits;
  std::size_t pos = haystack.find(needle);
  while (pos != std::string_view::npos) {
    const bool left_ok = pos == 0 || haystack[pos - 1] == ' ';
    const std::size_t end = pos + needle.size();
    const bool right_ok = end == haystack.size() || haystack[end] == ' ';
    if (left_ok && right_ok) hits.push_back(pos);
    pos = haystack.find(needle, pos + 1);
  }
  return hits;
}

bool contains_phrase(std::string_view haystack, std::string_view needle) {
  return !find_phrase(haystack, needle).empty();
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string join_choices(const std::vector<std::string>& parts) {
  if (parts.size() <= 1) return join(parts, "");
  if (parts.size() == 2) return parts[0] + " or " + parts[1];
  std::string out;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) out += parts[i] + ", ";
  return out + "or " + parts.back();
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](unsigned char x, unsigned char y) {
           return std::tolower(x) == std::tolower(y);
         });
}

}  // namespace disambig::text
