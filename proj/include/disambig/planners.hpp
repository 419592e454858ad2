#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "disambig/scene.hpp"
#include "disambig/tree.hpp"

namespace disambig {

enum class CostModel { Expected, WorstCase };

enum class PlannerKind { Exact, Greedy, Enumeration, AttrLimited, Llm };

std::string to_token(PlannerKind kind);
// Accepts exact, greedy, enum, attr, llm. Throws std::invalid_argument.
PlannerKind planner_from_token(const std::string& token);
bool is_rule_based(PlannerKind kind);

struct PlannerConfig {
  // Permit features the scene description never mentions.
  bool allow_inferred = false;
  // Largest candidate set handled by exact search.
  std::size_t exact_limit = 16;
};

struct AttrLimitConfig {
  std::vector<std::string> colors{"black", "white", "gray", "red",  "orange", "yellow",
                                  "green", "blue",  "purple", "pink", "brown"};
  std::string color_feature = "color";
};

// Name of the derived planar-cell feature used by the attribute-limited
// planner. Answers come from grid_cell().
inline constexpr const char* kGridFeature = "grid location";

// Feature names that split `candidates` into at least two blocks and are
// assigned on every candidate, sorted by name.
std::vector<std::string> splitting_features(const Scene& scene, const CandidateSet& candidates,
                                            const PlannerConfig& config);

// Entropy (bits) of the uniform distribution over `candidates` minus the
// expected entropy after splitting on `feature`.
double information_gain(const Scene& scene, const CandidateSet& candidates,
                        const std::string& feature);

// Question text for a feature split, e.g. "Which layer is it: bottom, middle, or top?".
std::string feature_question(const std::string& feature, const std::vector<std::string>& values);

DecisionTree build_tree_greedy(const Scene& scene, const CandidateSet& candidates,
                               const PlannerConfig& config);

class ExactLimitExceeded : public std::runtime_error {
 public:
  ExactLimitExceeded(std::size_t count, std::size_t limit)
      : std::runtime_error("exact search over " + std::to_string(count) +
                           " candidates exceeds the limit of " + std::to_string(limit)) {}
};

struct ExactResult {
  DecisionTree tree;
  Rational cost;
};

// Minimum-cost single-feature question tree. Candidate sets no feature can
// split become ambiguous nodes; the search first minimizes how many
// candidates end up in such nodes, then the cost.
ExactResult build_tree_exact(const Scene& scene, const CandidateSet& candidates,
                             CostModel cost_model, const PlannerConfig& config);

// Chain of yes/no pointing questions in the given order. The last object is
// confirmed by elimination, so depths run 1, 2, .., k-1, k-1.
DecisionTree enumeration_plan(const Scene& scene, const std::vector<ObjectId>& order);

// Average confirmations when every candidate, the last included, costs one
// pointing query: (k + 1) / 2.
Rational expected_enum_queries(std::int64_t k);

// Queries the chain tree asks for a target at zero-based position `index`
// among `k` candidates.
int enumeration_tree_queries(std::size_t index, std::size_t k);

// Greedy tree restricted to basic colors and the 3x3 planar grid.
DecisionTree build_tree_attr_limited(const Scene& scene, const CandidateSet& candidates,
                                     const AttrLimitConfig& config = {});

// Cost of a tree under a cost model (expected or worst case).
Rational tree_cost(const DecisionTree& tree, CostModel model);

}  // namespace disambig
