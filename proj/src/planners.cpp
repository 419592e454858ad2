#include "disambig/planners.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <tuple>
#include <unordered_map>

#include <spdlog/spdlog.h>

#include "disambig/text.hpp"

namespace disambig {

std::string to_token(PlannerKind kind) {
  switch (kind) {
    case PlannerKind::Exact: return "exact";
    case PlannerKind::Greedy: return "greedy";
    case PlannerKind::Enumeration: return "enum";
    case PlannerKind::AttrLimited: return "attr";
    case PlannerKind::Llm: return "llm";
  }
  return "unknown";
}

PlannerKind planner_from_token(const std::string& token) {
  if (token == "exact") return PlannerKind::Exact;
  if (token == "greedy") return PlannerKind::Greedy;
  if (token == "enum") return PlannerKind::Enumeration;
  if (token == "attr") return PlannerKind::AttrLimited;
  if (token == "llm") return PlannerKind::Llm;
  throw std::invalid_argument("unknown planner '" + token +
                              "' (expected exact, greedy, enum, attr or llm)");
}

bool is_rule_based(PlannerKind kind) { return kind != PlannerKind::Llm; }

namespace {

// Candidate-by-feature value table. value[f][i] is the value index of
// candidate i for feature f, or -1 when unassigned.
struct FeatureTable {
  std::vector<ObjectId> ids;
  std::vector<std::string> names;
  std::vector<std::vector<std::string>> values;
  std::vector<std::vector<int>> value;

  void add_feature(std::string name, std::vector<std::string> labels,
                   const std::function<std::optional<std::string>(const ObjectId&)>& lookup) {
    std::vector<int> column;
    column.reserve(ids.size());
    for (const auto& id : ids) {
      const auto v = lookup(id);
      int idx = -1;
      if (v) {
        auto it = std::find(labels.begin(), labels.end(), *v);
        if (it != labels.end()) idx = static_cast<int>(it - labels.begin());
      }
      column.push_back(idx);
    }
    names.push_back(std::move(name));
    values.push_back(std::move(labels));
    value.push_back(std::move(column));
  }

  // Features in name order, for deterministic tie-breaks.
  std::vector<std::size_t> order() const {
    std::vector<std::size_t> idx(names.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return names[a] < names[b]; });
    return idx;
  }

  // Blocks of `members` under feature f in declared value order; empty when
  // some member is unassigned.
  std::vector<std::vector<int>> split(std::size_t f, const std::vector<int>& members) const {
    std::vector<std::vector<int>> by_value(values[f].size());
    for (int m : members) {
      const int v = value[f][static_cast<std::size_t>(m)];
      if (v < 0) return {};
      by_value[static_cast<std::size_t>(v)].push_back(m);
    }
    std::vector<std::vector<int>> blocks;
    for (auto& b : by_value) {
      if (!b.empty()) blocks.push_back(std::move(b));
    }
    return blocks;
  }

  std::string block_label(std::size_t f, const std::vector<int>& block) const {
    return values[f][static_cast<std::size_t>(value[f][static_cast<std::size_t>(block.front())])];
  }

  std::vector<ObjectId> ids_of(const std::vector<int>& members) const {
    std::vector<ObjectId> out;
    for (int m : members) out.push_back(ids[static_cast<std::size_t>(m)]);
    std::sort(out.begin(), out.end());
    return out;
  }
};

FeatureTable scene_table(const Scene& scene, const CandidateSet& candidates,
                         const PlannerConfig& config) {
  FeatureTable t;
  t.ids.assign(candidates.begin(), candidates.end());
  for (const auto& f : scene.features) {
    if (!f.mentioned && !config.allow_inferred) continue;
    t.add_feature(f.name, f.values, [&](const ObjectId& id) -> std::optional<std::string> {
      const std::string* v = scene.object(id).value_of(f.name);
      return v ? std::optional<std::string>(*v) : std::nullopt;
    });
  }
  return t;
}

double entropy_gain(const std::vector<std::vector<int>>& blocks, std::size_t n) {
  std::vector<std::size_t> sizes;
  for (const auto& b : blocks) sizes.push_back(b.size());
  std::sort(sizes.begin(), sizes.end());
  const double total = static_cast<double>(n);
  double conditional = 0.0;
  for (std::size_t s : sizes) {
    const double p = static_cast<double>(s) / total;
    conditional += p * std::log2(static_cast<double>(s));
  }
  return std::log2(total) - conditional;
}

std::vector<int> all_members(const FeatureTable& t) {
  std::vector<int> m(t.ids.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = static_cast<int>(i);
  return m;
}

TreeNode greedy_node(const FeatureTable& t, const std::vector<int>& members) {
  if (members.size() == 1) return TreeNode::leaf(t.ids[static_cast<std::size_t>(members.front())]);
  std::optional<std::size_t> best;
  double best_gain = 0.0;
  std::vector<std::vector<int>> best_blocks;
  for (std::size_t f : t.order()) {
    auto blocks = t.split(f, members);
    if (blocks.size() < 2) continue;
    const double gain = entropy_gain(blocks, members.size());
    if (!best || gain > best_gain + 1e-12) {
      best = f;
      best_gain = gain;
      best_blocks = std::move(blocks);
    }
  }
  if (!best) return TreeNode::ambiguous(t.ids_of(members));
  std::vector<Branch> branches;
  std::vector<std::string> labels;
  for (const auto& block : best_blocks) {
    labels.push_back(t.block_label(*best, block));
    branches.push_back({labels.back(), greedy_node(t, block)});
  }
  return TreeNode::question(feature_question(t.names[*best], labels), std::move(branches),
                            t.names[*best]);
}

}  // namespace

std::vector<std::string> splitting_features(const Scene& scene, const CandidateSet& candidates,
                                            const PlannerConfig& config) {
  const FeatureTable t = scene_table(scene, candidates, config);
  const auto members = all_members(t);
  std::vector<std::string> out;
  for (std::size_t f : t.order()) {
    if (t.split(f, members).size() >= 2) out.push_back(t.names[f]);
  }
  return out;
}

double information_gain(const Scene& scene, const CandidateSet& candidates,
                        const std::string& feature) {
  const auto blocks = partition_by_feature(scene, candidates, feature);
  std::vector<std::vector<int>> sized;
  for (const auto& b : blocks) sized.emplace_back(b.members.size(), 0);
  return entropy_gain(sized, candidates.size());
}

std::string feature_question(const std::string& feature, const std::vector<std::string>& values) {
  return "Which " + feature + " is it: " + text::join_choices(values) + "?";
}

DecisionTree build_tree_greedy(const Scene& scene, const CandidateSet& candidates,
                               const PlannerConfig& config) {
  if (candidates.empty()) throw std::invalid_argument("no candidates");
  const FeatureTable t = scene_table(scene, candidates, config);
  return DecisionTree{greedy_node(t, all_members(t))};
}

namespace {

struct ExactEntry {
  std::int64_t ambiguous_mass = 0;
  std::int64_t cost = 0;  // total leaf depth (expected) or height (worst case)
  int feature = -1;
};

class ExactSearch {
 public:
  ExactSearch(const FeatureTable& t, CostModel model) : t_(t), model_(model), order_(t.order()) {}

  const ExactEntry& solve(std::uint64_t mask) {
    if (auto it = memo_.find(mask); it != memo_.end()) return it->second;
    const std::vector<int> members = members_of(mask);
    ExactEntry best;
    bool found = false;
    if (members.size() > 1) {
      for (std::size_t f : order_) {
        const auto blocks = t_.split(f, members);
        if (blocks.size() < 2) continue;
        ExactEntry cand;
        cand.feature = static_cast<int>(f);
        cand.cost = model_ == CostModel::Expected ? static_cast<std::int64_t>(members.size()) : 0;
        for (const auto& block : blocks) {
          const ExactEntry& sub = solve(mask_of(block));
          cand.ambiguous_mass += sub.ambiguous_mass;
          if (model_ == CostModel::Expected) {
            cand.cost += sub.cost;
          } else {
            cand.cost = std::max(cand.cost, sub.cost + 1);
          }
        }
        if (!found || std::tie(cand.ambiguous_mass, cand.cost) < std::tie(best.ambiguous_mass, best.cost)) {
          best = cand;
          found = true;
        }
      }
      if (!found) best.ambiguous_mass = static_cast<std::int64_t>(members.size());
    }
    return memo_.emplace(mask, best).first->second;
  }

  TreeNode build(std::uint64_t mask) {
    const ExactEntry entry = solve(mask);
    const std::vector<int> members = members_of(mask);
    if (members.size() == 1) return TreeNode::leaf(t_.ids[static_cast<std::size_t>(members.front())]);
    if (entry.feature < 0) return TreeNode::ambiguous(t_.ids_of(members));
    const auto f = static_cast<std::size_t>(entry.feature);
    std::vector<Branch> branches;
    std::vector<std::string> labels;
    for (const auto& block : t_.split(f, members)) {
      labels.push_back(t_.block_label(f, block));
      branches.push_back({labels.back(), build(mask_of(block))});
    }
    return TreeNode::question(feature_question(t_.names[f], labels), std::move(branches), t_.names[f]);
  }

  static std::uint64_t mask_of(const std::vector<int>& members) {
    std::uint64_t m = 0;
    for (int i : members) m |= std::uint64_t{1} << i;
    return m;
  }

 private:
  std::vector<int> members_of(std::uint64_t mask) const {
    std::vector<int> out;
    for (int i = 0; i < 64; ++i) {
      if (mask & (std::uint64_t{1} << i)) out.push_back(i);
    }
    return out;
  }

  const FeatureTable& t_;
  CostModel model_;
  std::vector<std::size_t> order_;
  std::unordered_map<std::uint64_t, ExactEntry> memo_;
};

}  // namespace

ExactResult build_tree_exact(const Scene& scene, const CandidateSet& candidates,
                             CostModel cost_model, const PlannerConfig& config) {
  if (candidates.empty()) throw std::invalid_argument("no candidates");
  if (candidates.size() > config.exact_limit || candidates.size() > 63) {
    throw ExactLimitExceeded(candidates.size(), config.exact_limit);
  }
  const FeatureTable t = scene_table(scene, candidates, config);
  ExactSearch search(t, cost_model);
  const std::uint64_t full = ExactSearch::mask_of(all_members(t));
  const ExactEntry& best = search.solve(full);
  ExactResult out;
  out.tree = DecisionTree{search.build(full)};
  out.cost = cost_model == CostModel::Expected
                 ? Rational(best.cost, static_cast<std::int64_t>(candidates.size()))
                 : Rational(best.cost);
  return out;
}

DecisionTree enumeration_plan(const Scene& scene, const std::vector<ObjectId>& order) {
  if (order.empty()) throw std::invalid_argument("no candidates");
  TreeNode node = TreeNode::leaf(order.back());
  for (std::size_t i = order.size() - 1; i-- > 0;) {
    const ObjectInstance& obj = scene.object(order[i]);
    TreeNode q = TreeNode::question("Is it the " + obj.display_name + "?",
                                    {{"yes", TreeNode::leaf(order[i])}, {"no", std::move(node)}});
    q.pointed = order[i];
    node = std::move(q);
  }
  return DecisionTree{std::move(node)};
}

Rational expected_enum_queries(std::int64_t k) {
  if (k < 1) throw std::invalid_argument("k must be positive");
  return Rational(k + 1, 2);
}

int enumeration_tree_queries(std::size_t index, std::size_t k) {
  if (k <= 1) return 0;
  return static_cast<int>(std::min(index + 1, k - 1));
}

DecisionTree build_tree_attr_limited(const Scene& scene, const CandidateSet& candidates,
                                     const AttrLimitConfig& config) {
  if (candidates.empty()) throw std::invalid_argument("no candidates");
  FeatureTable t;
  t.ids.assign(candidates.begin(), candidates.end());
  t.add_feature(config.color_feature, config.colors,
                [&](const ObjectId& id) -> std::optional<std::string> {
                  const std::string* v = scene.object(id).value_of(config.color_feature);
                  return v ? std::optional<std::string>(*v) : std::nullopt;
                });
  t.add_feature(kGridFeature, grid_cell_labels(),
                [&](const ObjectId& id) { return grid_cell(scene, id); });
  return DecisionTree{greedy_node(t, all_members(t))};
}

Rational tree_cost(const DecisionTree& tree, CostModel model) {
  const TreeMetrics m = tree_metrics(tree);
  return model == CostModel::Expected ? m.expected_queries : Rational(m.worst_case_depth);
}

}  // namespace disambig
