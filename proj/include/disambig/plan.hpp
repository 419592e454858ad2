#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "disambig/action.hpp"
#include "disambig/lenient_doc.hpp"
#include "disambig/tree.hpp"

namespace disambig {

struct PlanStep {
  Action action;
  std::string reason;

  friend bool operator==(const PlanStep&, const PlanStep&) = default;
};

struct PlanOption;

// One level of an Action Planner document. When `options` is non-empty the
// last step is the Ask whose answers select among them.
struct ActionPlan {
  std::string target_hypothesis;  // raw value, e.g. "<apple> or <chocolate bar>"
  std::string target_reason;
  std::vector<PlanStep> steps;
  std::vector<PlanOption> options;

  friend bool operator==(const ActionPlan&, const ActionPlan&);
};

struct PlanOption {
  std::string label;
  ActionPlan plan;

  friend bool operator==(const PlanOption&, const PlanOption&) = default;
};

class PlanError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Reads the `target object / reason / direction / options` entries of an
// Action Planner document.
ActionPlan plan_from_doc(const LenientDoc& doc);
LenientDoc plan_to_doc(const ActionPlan& plan);

// Ask-with-options becomes a question node; Deliver becomes a leaf carrying
// the move-away phrases that preceded it on its path.
DecisionTree plan_to_tree(const ActionPlan& plan);

std::size_t deliver_count(const ActionPlan& plan);

enum class DocumentBlock { ActionPlanner, DecisionTree };

class ExtractionError : public std::runtime_error {
 public:
  ExtractionError(DocumentBlock block, const std::string& what, std::size_t offset)
      : std::runtime_error(what), block_(block), offset_(offset) {}
  DocumentBlock block() const noexcept { return block_; }
  // Offset into the full response text.
  std::size_t offset() const noexcept { return offset_; }

 private:
  DocumentBlock block_;
  std::size_t offset_;
};

struct ExtractedDocuments {
  LenientDoc planner;
  LenientDoc tree;
};

// Finds the "Action Planner:" and "Decision Tree:" headers (case-insensitive,
// first occurrence each, either order) and parses the object after each.
ExtractedDocuments extract_documents(std::string_view response);

class TreeDocError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Nested single-key maps and lists: a map key is a question, list entries are
// its branches, strings are leaves. Also accepts {"label": .., "node": ..}
// branches and {"kind": "ambiguous", "objects": [..]} nodes.
DecisionTree normalize_nested_tree(const LenientDoc& doc);
LenientDoc tree_to_nested_doc(const DecisionTree& tree);

// DOT rendering for figures.
std::string tree_to_dot(const DecisionTree& tree);

}  // namespace disambig
