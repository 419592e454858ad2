#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "disambig/scene.hpp"

namespace disambig {

using Rational = boost::rational<std::int64_t>;

struct Branch;

enum class NodeKind { Leaf, Question, Ambiguous };

struct TreeNode {
  NodeKind kind = NodeKind::Leaf;
  // Leaf: object id or object phrase. Question: question text.
  std::string text;
  // Question: feature the question partitions on, when known.
  std::optional<std::string> feature;
  // Question: object pointed at by a yes/no confirmation query.
  std::optional<ObjectId> pointed;
  std::vector<Branch> branches;
  // Ambiguous: the objects this node cannot tell apart (at least two).
  std::vector<ObjectId> covered;
  // Leaf: objects to move away before delivery, in order.
  std::vector<std::string> pre_actions;

  static TreeNode leaf(std::string object, std::vector<std::string> pre_actions = {});
  static TreeNode question(std::string text, std::vector<Branch> branches,
                           std::optional<std::string> feature = std::nullopt);
  static TreeNode ambiguous(std::vector<ObjectId> covered);

  bool is_leaf() const { return kind == NodeKind::Leaf; }
  bool is_question() const { return kind == NodeKind::Question; }
  bool is_ambiguous() const { return kind == NodeKind::Ambiguous; }

  // Branch with exactly this label, or nullptr.
  const Branch* branch(const std::string& label) const;
  std::vector<std::string> labels() const;

  friend bool operator==(const TreeNode&, const TreeNode&);
};

struct Branch {
  std::string label;
  TreeNode node;

  friend bool operator==(const Branch&, const Branch&) = default;
};

struct DecisionTree {
  TreeNode root;

  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;
};

enum class TreeIssueKind {
  UncoveredCandidate,
  DuplicateLeaf,
  DanglingObject,
  SingleBranch,
  DuplicateBranchLabel,
  AmbiguousTooSmall,
};

std::string to_string(TreeIssueKind kind);

struct TreeIssue {
  TreeIssueKind kind;
  std::string message;
};

struct ValidationReport {
  std::vector<TreeIssue> issues;
  std::size_t candidate_count = 0;
  std::size_t covered = 0;  // candidates appearing as exactly one unambiguous leaf

  bool valid() const { return issues.empty(); }
  Rational coverage() const;
  bool has(TreeIssueKind kind) const;
};

ValidationReport validate_tree(const DecisionTree& tree, const CandidateSet& candidates);

struct TreeMetrics {
  Rational expected_queries;
  int worst_case_depth = 0;
  int leaf_count = 0;
  int ambiguous_leaf_count = 0;
};

// Mean leaf depth under a uniform prior over covered objects; an ambiguous
// node weighs as many objects as it covers.
Rational expected_query_count(const DecisionTree& tree);
int worst_case_depth(const DecisionTree& tree);
TreeMetrics tree_metrics(const DecisionTree& tree);

// Leaf and ambiguous-node objects in depth-first order.
std::vector<std::string> leaf_objects(const DecisionTree& tree);

struct PathStep {
  std::string question;
  std::string answer;

  friend bool operator==(const PathStep&, const PathStep&) = default;
};

struct TreePath {
  std::vector<PathStep> steps;
  const TreeNode* terminal = nullptr;  // leaf or ambiguous node reached
};

// Answer label for a question node.
using Answerer = std::function<std::string(const TreeNode& question)>;

class BranchMismatch : public std::runtime_error {
 public:
  BranchMismatch(const std::string& question, const std::string& answer)
      : std::runtime_error("answer '" + answer + "' is not a branch of question '" + question + "'"),
        question_(question),
        answer_(answer) {}
  const std::string& question() const noexcept { return question_; }
  const std::string& answer() const noexcept { return answer_; }

 private:
  std::string question_;
  std::string answer_;
};

// `target` is not consulted by the walk itself; answers come from `answerer`.
TreePath path_for_target(const DecisionTree& tree, const ObjectId& target,
                         const Answerer& answerer);

// Answers each question with the branch whose subtree holds `target`.
Answerer truthful_answerer(const ObjectId& target);

bool subtree_contains(const TreeNode& node, const std::string& object);

// Order-insensitive structural fingerprint over normalized leaf phrases.
std::string shape_signature(const TreeNode& node);

}  // namespace disambig
