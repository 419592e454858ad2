#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace disambig {

// How a scalar or key was written in the source text. Bare and Angle text is
// kept verbatim (angle brackets included); Quoted text is stored unescaped.
enum class TokenStyle { Quoted, Bare, Angle };

struct LenientValue;

struct LenientKey {
  std::string text;
  TokenStyle style = TokenStyle::Quoted;

  // Text without surrounding angle brackets.
  std::string label() const;

  friend bool operator==(const LenientKey&, const LenientKey&) = default;
};

struct LenientEntry;

// Object and list members are both ordered entries. Object entries always
// carry a key (duplicates allowed); list entries carry one only for the
// labelled form `[ <label>: {...} ]`.
struct LenientValue {
  enum class Kind { Scalar, Object, List };

  Kind kind = Kind::Scalar;
  std::string text;
  TokenStyle style = TokenStyle::Quoted;
  std::vector<LenientEntry> items;

  static LenientValue scalar(std::string text, TokenStyle style = TokenStyle::Quoted);
  static LenientValue object(std::vector<LenientEntry> items = {});
  static LenientValue list(std::vector<LenientEntry> items = {});

  bool is_scalar() const { return kind == Kind::Scalar; }
  bool is_object() const { return kind == Kind::Object; }
  bool is_list() const { return kind == Kind::List; }

  // All values stored under `key` (object entries), in order.
  std::vector<const LenientValue*> all(std::string_view key) const;
  const LenientValue* first(std::string_view key) const;

  friend bool operator==(const LenientValue&, const LenientValue&);
};

struct LenientEntry {
  std::optional<LenientKey> key;
  LenientValue value;

  friend bool operator==(const LenientEntry&, const LenientEntry&) = default;
};

using LenientDoc = LenientValue;

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// Parses one object document. Accepts strict JSON objects plus unquoted keys,
// `<...>` phrase values (optionally joined by ` or `), duplicate keys,
// trailing commas and labelled list entries. Only whitespace may follow.
LenientDoc parse_lenient_doc(std::string_view text);

struct PrefixParse {
  LenientDoc doc;
  std::size_t end = 0;  // offset just past the closing brace
};

// Parses the first object starting at or after `start`; trailing text is left
// alone.
PrefixParse parse_lenient_prefix(std::string_view text, std::size_t start = 0);

// Canonical two-space-indented printer. Reparsing its output yields an equal
// document.
std::string print_lenient_doc(const LenientValue& doc);

// Splits "<a> or <b>" into {"a", "b"}; a bare phrase yields itself.
std::vector<std::string> angle_phrases(std::string_view text);

// Text of a scalar with one layer of surrounding angle brackets removed.
std::string unwrap_angle(std::string_view text);

}  // namespace disambig
