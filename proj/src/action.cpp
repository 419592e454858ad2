#include "disambig/action.hpp"

#include <cctype>

#include "disambig/lenient_doc.hpp"
#include "disambig/text.hpp"

namespace disambig {

namespace {

std::string collapse_spaces(std::string_view s) {
  std::string out;
  bool space = false;
  for (char c : text::trim(s)) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = true;
      continue;
    }
    if (space && !out.empty()) out.push_back(' ');
    space = false;
    out.push_back(c);
  }
  return out;
}

}  // namespace

Action parse_action(std::string_view text) {
  std::size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  skip_ws();
  if (pos >= text.size()) throw ParseError("missing action", pos);
  if (text[pos] != '<') throw ParseError("expected '<' before the action verb", pos);
  const std::size_t verb_open = pos;
  const std::size_t verb_close = text.find('>', pos + 1);
  if (verb_close == std::string_view::npos) throw ParseError("unbalanced '<'", verb_open);
  const std::string verb =
      text::to_lower(collapse_spaces(text.substr(verb_open + 1, verb_close - verb_open - 1)));
  pos = verb_close + 1;

  skip_ws();
  if (pos >= text.size()) throw ParseError("missing payload after <" + verb + ">", pos);
  if (text[pos] != '<') throw ParseError("expected '<' before the payload", pos);
  const std::size_t payload_open = pos;
  std::size_t end = text.size();
  while (end > payload_open && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
  if (text[end - 1] != '>' || end - 1 == payload_open) {
    throw ParseError("unbalanced '<'", payload_open);
  }
  std::string payload = text::trim(text.substr(payload_open + 1, end - payload_open - 2));
  if (payload.empty()) throw ParseError("missing payload after <" + verb + ">", payload_open);

  if (verb == "ask") {
    if (payload.back() != '?') payload.push_back('?');
    return Ask{payload, {}, std::nullopt, std::nullopt};
  }
  if (verb == "move away") return MoveAway{payload};
  if (verb == "deliver") return Deliver{payload};
  throw ParseError("unknown action verb '" + verb + "'", verb_open);
}

std::string verb_of(const Action& action) {
  struct Visitor {
    std::string operator()(const Ask&) const { return "ask"; }
    std::string operator()(const MoveAway&) const { return "move away"; }
    std::string operator()(const Deliver&) const { return "deliver"; }
  };
  return std::visit(Visitor{}, action);
}

std::string print_action(const Action& action) {
  struct Visitor {
    std::string operator()(const Ask& a) const { return a.question; }
    std::string operator()(const MoveAway& m) const { return m.object_phrase; }
    std::string operator()(const Deliver& d) const { return d.object_phrase; }
  };
  return "<" + verb_of(action) + "> <" + std::visit(Visitor{}, action) + ">";
}

std::vector<std::string> options_from_question(std::string_view question) {
  std::string q = text::trim(question);
  while (!q.empty() && (q.back() == '?' || q.back() == '.')) q.pop_back();

  // Split on ", or ", ", " and " or " in that order of preference.
  std::vector<std::string> parts;
  std::string rest = q;
  for (;;) {
    std::size_t best = std::string::npos;
    std::size_t len = 0;
    for (std::string_view sep : {", or ", ", ", " or "}) {
      const std::size_t at = rest.find(sep);
      if (at != std::string::npos && at < best) {
        best = at;
        len = sep.size();
      }
    }
    if (best == std::string::npos) break;
    parts.push_back(text::trim(rest.substr(0, best)));
    rest = rest.substr(best + len);
  }
  parts.push_back(text::trim(rest));

  std::vector<std::string> out;
  for (auto& p : parts) {
    if (!p.empty()) out.push_back(std::move(p));
  }
  return out;
}

}  // namespace disambig
