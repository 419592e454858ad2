#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "disambig/scene.hpp"

namespace disambig {

struct Ask {
  std::string question;
  std::vector<std::string> options;
  // Hints attached by rule-based planners; not part of the printed form.
  std::optional<std::string> feature;
  std::optional<ObjectId> pointed;

  friend bool operator==(const Ask&, const Ask&) = default;
};

struct MoveAway {
  std::string object_phrase;
  friend bool operator==(const MoveAway&, const MoveAway&) = default;
};

struct Deliver {
  std::string object_phrase;
  friend bool operator==(const Deliver&, const Deliver&) = default;
};

using Action = std::variant<Ask, MoveAway, Deliver>;

// `<verb> <payload>` with verb one of ask, move away, deliver (any case).
// Ask questions are normalized to end with '?'. Throws ParseError.
Action parse_action(std::string_view text);
std::string print_action(const Action& action);

std::string verb_of(const Action& action);

// Options of a question written as a disjunction: "a, b, or c?" gives
// {"a", "b", "c"}. The first option keeps any lead-in words.
std::vector<std::string> options_from_question(std::string_view question);

}  // namespace disambig
