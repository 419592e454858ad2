#include "disambig/tree.hpp"

#include <algorithm>
#include <map>

#include "disambig/text.hpp"

namespace disambig {

TreeNode TreeNode::leaf(std::string object, std::vector<std::string> pre_actions) {
  TreeNode n;
  n.kind = NodeKind::Leaf;
  n.text = std::move(object);
  n.pre_actions = std::move(pre_actions);
  return n;
}

TreeNode TreeNode::question(std::string text, std::vector<Branch> branches,
                            std::optional<std::string> feature) {
  TreeNode n;
  n.kind = NodeKind::Question;
  n.text = std::move(text);
  n.branches = std::move(branches);
  n.feature = std::move(feature);
  return n;
}

TreeNode TreeNode::ambiguous(std::vector<ObjectId> covered) {
  TreeNode n;
  n.kind = NodeKind::Ambiguous;
  n.covered = std::move(covered);
  return n;
}

const Branch* TreeNode::branch(const std::string& label) const {
  for (const auto& b : branches) {
    if (b.label == label) return &b;
  }
  return nullptr;
}

std::vector<std::string> TreeNode::labels() const {
  std::vector<std::string> out;
  out.reserve(branches.size());
  for (const auto& b : branches) out.push_back(b.label);
  return out;
}

bool operator==(const TreeNode& a, const TreeNode& b) {
  return a.kind == b.kind && a.text == b.text && a.feature == b.feature &&
         a.pointed == b.pointed && a.branches == b.branches && a.covered == b.covered &&
         a.pre_actions == b.pre_actions;
}

std::string to_string(TreeIssueKind kind) {
  switch (kind) {
    case TreeIssueKind::UncoveredCandidate: return "uncovered candidate";
    case TreeIssueKind::DuplicateLeaf: return "duplicate leaf";
    case TreeIssueKind::DanglingObject: return "dangling object";
    case TreeIssueKind::SingleBranch: return "single-branch question";
    case TreeIssueKind::DuplicateBranchLabel: return "duplicate branch label";
    case TreeIssueKind::AmbiguousTooSmall: return "ambiguous node covers fewer than two objects";
  }
  return "unknown";
}

Rational ValidationReport::coverage() const {
  if (candidate_count == 0) return Rational(0);
  return Rational(static_cast<std::int64_t>(covered), static_cast<std::int64_t>(candidate_count));
}

bool ValidationReport::has(TreeIssueKind kind) const {
  return std::any_of(issues.begin(), issues.end(),
                     [&](const TreeIssue& i) { return i.kind == kind; });
}

namespace {

struct LeafTally {
  std::map<std::string, int> unambiguous;
  std::map<std::string, int> in_ambiguous;
};

void walk_validate(const TreeNode& node, LeafTally& tally, std::vector<TreeIssue>& issues) {
  switch (node.kind) {
    case NodeKind::Leaf:
      ++tally.unambiguous[node.text];
      return;
    case NodeKind::Ambiguous:
      if (node.covered.size() < 2) {
        issues.push_back({TreeIssueKind::AmbiguousTooSmall, "ambiguous node with " +
                                                                std::to_string(node.covered.size()) +
                                                                " object(s)"});
      }
      for (const auto& id : node.covered) ++tally.in_ambiguous[id];
      return;
    case NodeKind::Question: {
      if (node.branches.size() < 2) {
        issues.push_back({TreeIssueKind::SingleBranch, "question '" + node.text + "' has " +
                                                           std::to_string(node.branches.size()) +
                                                           " branch(es)"});
      }
      std::set<std::string> seen;
      for (const auto& b : node.branches) {
        if (!seen.insert(b.label).second) {
          issues.push_back({TreeIssueKind::DuplicateBranchLabel,
                            "question '" + node.text + "' repeats label '" + b.label + "'"});
        }
        walk_validate(b.node, tally, issues);
      }
      return;
    }
  }
}

}  // namespace

ValidationReport validate_tree(const DecisionTree& tree, const CandidateSet& candidates) {
  ValidationReport report;
  report.candidate_count = candidates.size();
  LeafTally tally;
  walk_validate(tree.root, tally, report.issues);

  std::map<std::string, int> total = tally.unambiguous;
  for (const auto& [id, n] : tally.in_ambiguous) total[id] += n;
  for (const auto& [id, n] : total) {
    if (n > 1) {
      report.issues.push_back({TreeIssueKind::DuplicateLeaf,
                               "object '" + id + "' appears " + std::to_string(n) + " times"});
    }
    if (!candidates.count(id)) {
      report.issues.push_back({TreeIssueKind::DanglingObject,
                               "leaf '" + id + "' is not a candidate"});
    }
  }
  for (const auto& id : candidates) {
    auto u = tally.unambiguous.find(id);
    const int unamb = u == tally.unambiguous.end() ? 0 : u->second;
    const int amb = tally.in_ambiguous.count(id) ? tally.in_ambiguous.at(id) : 0;
    if (unamb == 1 && amb == 0) {
      ++report.covered;
    } else if (unamb == 0) {
      report.issues.push_back({TreeIssueKind::UncoveredCandidate,
                               "candidate '" + id + "' is not a unique leaf"});
    }
  }
  return report;
}

namespace {

void accumulate_depths(const TreeNode& node, std::int64_t depth, std::int64_t& weighted,
                       std::int64_t& mass, int& worst, int& leaves, int& ambiguous) {
  switch (node.kind) {
    case NodeKind::Leaf:
      weighted += depth;
      mass += 1;
      ++leaves;
      worst = std::max(worst, static_cast<int>(depth));
      return;
    case NodeKind::Ambiguous: {
      const auto n = static_cast<std::int64_t>(std::max<std::size_t>(node.covered.size(), 1));
      weighted += depth * n;
      mass += n;
      ++leaves;
      ++ambiguous;
      worst = std::max(worst, static_cast<int>(depth));
      return;
    }
    case NodeKind::Question:
      for (const auto& b : node.branches) {
        accumulate_depths(b.node, depth + 1, weighted, mass, worst, leaves, ambiguous);
      }
      // A question without branches still costs a query but leads nowhere.
      if (node.branches.empty()) worst = std::max(worst, static_cast<int>(depth));
      return;
  }
}

}  // namespace

TreeMetrics tree_metrics(const DecisionTree& tree) {
  std::int64_t weighted = 0;
  std::int64_t mass = 0;
  TreeMetrics m;
  accumulate_depths(tree.root, 0, weighted, mass, m.worst_case_depth, m.leaf_count,
                    m.ambiguous_leaf_count);
  if (mass == 0) throw std::invalid_argument("decision tree has no leaves");
  m.expected_queries = Rational(weighted, mass);
  return m;
}

Rational expected_query_count(const DecisionTree& tree) { return tree_metrics(tree).expected_queries; }

int worst_case_depth(const DecisionTree& tree) { return tree_metrics(tree).worst_case_depth; }

namespace {

void collect_leaves(const TreeNode& node, std::vector<std::string>& out) {
  switch (node.kind) {
    case NodeKind::Leaf:
      out.push_back(node.text);
      return;
    case NodeKind::Ambiguous:
      out.insert(out.end(), node.covered.begin(), node.covered.end());
      return;
    case NodeKind::Question:
      for (const auto& b : node.branches) collect_leaves(b.node, out);
      return;
  }
}

}  // namespace

std::vector<std::string> leaf_objects(const DecisionTree& tree) {
  std::vector<std::string> out;
  collect_leaves(tree.root, out);
  return out;
}

bool subtree_contains(const TreeNode& node, const std::string& object) {
  switch (node.kind) {
    case NodeKind::Leaf:
      return node.text == object;
    case NodeKind::Ambiguous:
      return std::find(node.covered.begin(), node.covered.end(), object) != node.covered.end();
    case NodeKind::Question:
      return std::any_of(node.branches.begin(), node.branches.end(),
                         [&](const Branch& b) { return subtree_contains(b.node, object); });
  }
  return false;
}

TreePath path_for_target(const DecisionTree& tree, const ObjectId& /*target*/,
                         const Answerer& answerer) {
  TreePath path;
  const TreeNode* node = &tree.root;
  while (node->is_question()) {
    const std::string answer = answerer(*node);
    const Branch* next = node->branch(answer);
    if (!next) throw BranchMismatch(node->text, answer);
    path.steps.push_back({node->text, answer});
    node = &next->node;
  }
  path.terminal = node;
  return path;
}

Answerer truthful_answerer(const ObjectId& target) {
  return [target](const TreeNode& question) -> std::string {
    for (const auto& b : question.branches) {
      if (subtree_contains(b.node, target)) return b.label;
    }
    throw BranchMismatch(question.text, "<no branch holds " + target + ">");
  };
}

std::string shape_signature(const TreeNode& node) {
  switch (node.kind) {
    case NodeKind::Leaf:
      return text::normalize(node.text);
    case NodeKind::Ambiguous: {
      std::vector<std::string> ids(node.covered.begin(), node.covered.end());
      std::sort(ids.begin(), ids.end());
      return "{" + text::join(ids, "|") + "}";
    }
    case NodeKind::Question: {
      std::vector<std::string> parts;
      for (const auto& b : node.branches) parts.push_back(shape_signature(b.node));
      std::sort(parts.begin(), parts.end());
      return "(" + text::join(parts, ",") + ")";
    }
  }
  return {};
}

}  // namespace disambig
