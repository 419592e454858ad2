#pragma once

#include <optional>
#include <string>
#include <vector>

#include "disambig/action.hpp"
#include "disambig/scene.hpp"

namespace disambig {

inline constexpr const char* kNoneOfThose = "none of those";

struct UserOracle {
  const Scene* scene = nullptr;
  ObjectId hidden_target;

  // Throws UnknownObject when the target is not in the scene.
  UserOracle(const Scene& scene, ObjectId target);
};

struct OptionMatch {
  std::size_t length = 0;  // characters of the longest matched surface form
  bool contradicted = false;

  bool accepted() const { return length > 0 && !contradicted; }
};

// How `option` describes `object`: the longest of its surface forms (feature
// values, their synonyms, the display name) found in the option, and whether
// the option also names a different value of one of its features outside the
// matched spans. `feature` restricts matching to that feature.
OptionMatch match_option(const Scene& scene, const ObjectId& object, const std::string& option,
                         const std::optional<std::string>& feature = std::nullopt);

// Pointed questions get "yes" or "no". Otherwise the options (or, when the
// Ask has none, the question's disjunction) are matched against the target;
// the longest accepted match wins, first option on ties.
std::string oracle_answer(const UserOracle& oracle, const Ask& question);

// Options the oracle chooses among for `question`.
std::vector<std::string> answer_options(const Ask& question);

// Object named by a phrase: exact id, display name, then the unique best
// accepted match among `pool`.
std::optional<ObjectId> resolve_object_phrase(const Scene& scene, const std::string& phrase,
                                              const std::vector<ObjectId>& pool);

// Id or display-name lookup only.
std::optional<ObjectId> resolve_object_strict(const Scene& scene, const std::string& phrase);

// Yes/no verdict for a free-text question about `target`.
bool free_question_holds(const Scene& scene, const ObjectId& target, const std::string& question);

}  // namespace disambig
