#include "disambig/lenient_doc.hpp"

#include <cctype>
#include <cstdint>

#include "disambig/text.hpp"

namespace disambig {

std::string LenientKey::label() const { return unwrap_angle(text); }

LenientValue LenientValue::scalar(std::string text, TokenStyle style) {
  LenientValue v;
  v.kind = Kind::Scalar;
  v.text = std::move(text);
  v.style = style;
  return v;
}

LenientValue LenientValue::object(std::vector<LenientEntry> items) {
  LenientValue v;
  v.kind = Kind::Object;
  v.items = std::move(items);
  return v;
}

LenientValue LenientValue::list(std::vector<LenientEntry> items) {
  LenientValue v;
  v.kind = Kind::List;
  v.items = std::move(items);
  return v;
}

std::vector<const LenientValue*> LenientValue::all(std::string_view key) const {
  std::vector<const LenientValue*> out;
  for (const auto& e : items) {
    if (e.key && e.key->text == key) out.push_back(&e.value);
  }
  return out;
}

const LenientValue* LenientValue::first(std::string_view key) const {
  for (const auto& e : items) {
    if (e.key && e.key->text == key) return &e.value;
  }
  return nullptr;
}

bool operator==(const LenientValue& a, const LenientValue& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == LenientValue::Kind::Scalar) return a.text == b.text && a.style == b.style;
  return a.items == b.items;
}

namespace {

enum class Context { ObjectValue, ListItem, Key };

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  PrefixParse parse_prefix(std::size_t start) {
    pos_ = start;
    skip_ws();
    if (pos_ >= s_.size()) throw ParseError("empty input", pos_);
    if (s_[pos_] != '{') throw ParseError("expected '{'", pos_);
    PrefixParse out;
    out.doc = parse_object();
    out.end = pos_;
    return out;
  }

  std::size_t pos() const { return pos_; }
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

 private:
  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }

  LenientValue parse_object() {
    const std::size_t open = pos_;
    ++pos_;  // '{'
    LenientValue obj = LenientValue::object();
    for (;;) {
      skip_ws();
      if (at_end()) throw ParseError("unclosed '{'", open);
      const char c = peek();
      if (c == '}') {
        ++pos_;
        return obj;
      }
      if (c == ',') {
        ++pos_;
        continue;
      }
      if (c == ']') throw ParseError("mismatched ']' inside object", pos_);
      LenientEntry entry;
      entry.key = parse_key();
      skip_ws();
      if (at_end()) throw ParseError("unclosed '{'", open);
      if (peek() != ':') throw ParseError("expected ':' after key '" + entry.key->text + "'", pos_);
      ++pos_;
      entry.value = parse_value(Context::ObjectValue, open);
      obj.items.push_back(std::move(entry));
    }
  }

  LenientValue parse_list() {
    const std::size_t open = pos_;
    ++pos_;  // '['
    LenientValue list = LenientValue::list();
    for (;;) {
      skip_ws();
      if (at_end()) throw ParseError("unclosed '['", open);
      const char c = peek();
      if (c == ']') {
        ++pos_;
        return list;
      }
      if (c == ',') {
        ++pos_;
        continue;
      }
      if (c == '}') throw ParseError("mismatched '}' inside list", pos_);
      LenientEntry entry;
      LenientValue first = parse_value(Context::ListItem, open);
      skip_ws();
      if (!at_end() && peek() == ':' && first.is_scalar()) {
        ++pos_;
        entry.key = LenientKey{first.text, first.style};
        entry.value = parse_value(Context::ObjectValue, open);
      } else {
        entry.value = std::move(first);
      }
      list.items.push_back(std::move(entry));
    }
  }

  LenientKey parse_key() {
    if (peek() == '"') return {parse_quoted(), TokenStyle::Quoted};
    const std::size_t start = pos_;
    std::string raw = scan_run(Context::Key);
    if (raw.empty()) throw ParseError("expected a key", start);
    const TokenStyle style = raw.front() == '<' ? TokenStyle::Angle : TokenStyle::Bare;
    return {raw, style};
  }

  LenientValue parse_value(Context ctx, std::size_t container_open) {
    skip_ws();
    if (at_end()) {
      throw ParseError(std::string("unclosed '") + s_[container_open] + "'", container_open);
    }
    const char c = peek();
    if (c == '{') return parse_object();
    if (c == '[') return parse_list();
    if (c == '"') return LenientValue::scalar(parse_quoted(), TokenStyle::Quoted);
    const std::size_t start = pos_;
    std::string raw = scan_run(ctx);
    if (raw.empty()) throw ParseError("expected a value", start);
    return LenientValue::scalar(raw, raw.front() == '<' ? TokenStyle::Angle : TokenStyle::Bare);
  }

  // Reads unquoted text up to the next structural delimiter outside angle
  // brackets. Newlines end bare text but are allowed inside `<...>`.
  std::string scan_run(Context ctx) {
    const std::size_t start = pos_;
    while (!at_end()) {
      const char c = peek();
      if (c == '<') {
        const std::size_t open = pos_;
        const std::size_t close = s_.find('>', pos_ + 1);
        if (close == std::string_view::npos) throw ParseError("unclosed '<'", open);
        pos_ = close + 1;
        continue;
      }
      if (c == ',' || c == '}' || c == ']' || c == '{' || c == '[' || c == '\n' || c == '\r') break;
      if (c == ':' && ctx != Context::ObjectValue) break;
      if (c == '"' && ctx == Context::Key) break;
      ++pos_;
    }
    return text::trim(s_.substr(start, pos_ - start));
  }

  std::string parse_quoted() {
    const std::size_t open = pos_;
    ++pos_;
    std::string out;
    while (!at_end()) {
      const char c = s_[pos_++];
      if (c == '"') return out;
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      if (at_end()) break;
      const char e = s_[pos_++];
      switch (e) {
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        case '/': out.push_back('/'); break;
        case 'b': out.push_back('\b'); break;
        case 'f': out.push_back('\f'); break;
        case 'n': out.push_back('\n'); break;
        case 'r': out.push_back('\r'); break;
        case 't': out.push_back('\t'); break;
        case 'u': append_utf8(out, read_codepoint()); break;
        default: throw ParseError(std::string("invalid escape '\\") + e + "'", pos_ - 2);
      }
    }
    throw ParseError("unterminated string", open);
  }

  std::uint32_t read_hex4() {
    if (pos_ + 4 > s_.size()) throw ParseError("truncated \\u escape", pos_);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      const char h = s_[pos_++];
      v <<= 4;
      if (h >= '0' && h <= '9') v |= static_cast<std::uint32_t>(h - '0');
      else if (h >= 'a' && h <= 'f') v |= static_cast<std::uint32_t>(h - 'a' + 10);
      else if (h >= 'A' && h <= 'F') v |= static_cast<std::uint32_t>(h - 'A' + 10);
      else throw ParseError("invalid hex digit in \\u escape", pos_ - 1);
    }
    return v;
  }

  std::uint32_t read_codepoint() {
    std::uint32_t cp = read_hex4();
    if (cp >= 0xD800 && cp <= 0xDBFF && pos_ + 6 <= s_.size() && s_[pos_] == '\\' &&
        s_[pos_ + 1] == 'u') {
      pos_ += 2;
      const std::uint32_t low = read_hex4();
      if (low >= 0xDC00 && low <= 0xDFFF) {
        cp = 0x10000 + ((cp - 0xD800) << 10) + (low - 0xDC00);
      }
    }
    return cp;
  }

  static void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      default:
        if (c < 0x20) {
          static const char* hex = "0123456789abcdef";
          out += "\\u00";
          out.push_back(hex[c >> 4]);
          out.push_back(hex[c & 0xF]);
        } else {
          out.push_back(static_cast<char>(c));
        }
    }
  }
  return out + "\"";
}

std::string token(const std::string& text, TokenStyle style) {
  return style == TokenStyle::Quoted ? quote(text) : text;
}

void print_value(const LenientValue& v, int indent, std::string& out) {
  if (v.is_scalar()) {
    out += token(v.text, v.style);
    return;
  }
  const char open = v.is_object() ? '{' : '[';
  const char close = v.is_object() ? '}' : ']';
  if (v.items.empty()) {
    out.push_back(open);
    out.push_back(close);
    return;
  }
  out.push_back(open);
  out.push_back('\n');
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  for (std::size_t i = 0; i < v.items.size(); ++i) {
    const auto& e = v.items[i];
    out += pad;
    if (e.key) {
      out += token(e.key->text, e.key->style);
      out += ": ";
    }
    print_value(e.value, indent + 2, out);
    if (i + 1 < v.items.size()) out.push_back(',');
    out.push_back('\n');
  }
  out += std::string(static_cast<std::size_t>(indent), ' ');
  out.push_back(close);
}

}  // namespace

PrefixParse parse_lenient_prefix(std::string_view text, std::size_t start) {
  Parser p(text);
  std::size_t brace = text.find('{', start);
  if (brace == std::string_view::npos) {
    if (text.substr(start).find_first_not_of(" \t\r\n") == std::string_view::npos) {
      throw ParseError("empty input", start);
    }
    throw ParseError("expected '{'", start);
  }
  return p.parse_prefix(brace);
}

LenientDoc parse_lenient_doc(std::string_view text) {
  Parser p(text);
  PrefixParse r = p.parse_prefix(0);
  p.skip_ws();
  if (p.pos() < text.size()) throw ParseError("unexpected text after document", p.pos());
  return std::move(r.doc);
}

std::string print_lenient_doc(const LenientValue& doc) {
  std::string out;
  print_value(doc, 0, out);
  return out;
}

std::string unwrap_angle(std::string_view text) {
  std::string t = text::trim(text);
  if (t.size() >= 2 && t.front() == '<' && t.back() == '>' &&
      t.find('>') == t.size() - 1) {
    return text::trim(std::string_view(t).substr(1, t.size() - 2));
  }
  return t;
}

std::vector<std::string> angle_phrases(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  bool any = false;
  while ((pos = text.find('<', pos)) != std::string_view::npos) {
    const std::size_t close = text.find('>', pos + 1);
    if (close == std::string_view::npos) break;
    out.push_back(text::trim(text.substr(pos + 1, close - pos - 1)));
    any = true;
    pos = close + 1;
  }
  if (!any) out.push_back(text::trim(text));
  return out;
}

}  // namespace disambig
