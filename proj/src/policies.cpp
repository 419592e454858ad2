#include "disambig/policies.hpp"

#include <spdlog/spdlog.h>

#include "disambig/lenient_doc.hpp"
#include "disambig/text.hpp"

namespace disambig {

namespace {

const Branch* find_branch(const TreeNode& node, const std::string& answer) {
  if (const Branch* b = node.branch(answer)) return b;
  const std::string n = text::normalize(answer);
  for (const auto& b : node.branches) {
    if (text::normalize(b.label) == n) return &b;
  }
  return nullptr;
}

// Visited part of a tree: every node on the path with its branch labels,
// children expanded only along the answers taken.
nlohmann::json visited(const TreeNode& node, const std::vector<std::string>& path, std::size_t i) {
  nlohmann::json j;
  switch (node.kind) {
    case NodeKind::Question:
      j["kind"] = "question";
      j["text"] = node.text;
      j["options"] = node.labels();
      break;
    case NodeKind::Leaf:
      j["kind"] = "leaf";
      j["text"] = node.text;
      break;
    case NodeKind::Ambiguous:
      j["kind"] = "ambiguous";
      j["objects"] = node.covered;
      break;
  }
  if (node.is_question() && i < path.size()) {
    if (const Branch* b = find_branch(node, path[i])) {
      j["answer"] = b->label;
      j["child"] = visited(b->node, path, i + 1);
    }
  }
  return j;
}

}  // namespace

TreePolicy::TreePolicy(PlannerKind kind, PolicyOptions options)
    : kind_(kind), options_(std::move(options)) {
  if (!is_rule_based(kind)) throw std::invalid_argument("TreePolicy needs a rule-based planner");
}

void TreePolicy::begin(const Scene& scene, const Inquiry&, const CandidateSet& candidates) {
  scene_ = &scene;
  switch (kind_) {
    case PlannerKind::Exact: {
      PlannerConfig config = options_.config;
      config.allow_inferred = true;
      try {
        tree_ = build_tree_exact(scene, candidates, options_.cost_model, config).tree;
      } catch (const ExactLimitExceeded& e) {
        spdlog::warn("{}: {}; using greedy", scene.id, e.what());
        warnings_.push_back(std::string(e.what()) + "; fell back to greedy");
        tree_ = build_tree_greedy(scene, candidates, config);
      }
      break;
    }
    case PlannerKind::Greedy:
      tree_ = build_tree_greedy(scene, candidates, options_.config);
      break;
    case PlannerKind::Enumeration:
      tree_ = enumeration_plan(scene, std::vector<ObjectId>(candidates.begin(), candidates.end()));
      break;
    case PlannerKind::AttrLimited:
      tree_ = build_tree_attr_limited(scene, candidates, options_.attr);
      break;
    case PlannerKind::Llm:
      break;
  }
  node_ = &tree_.root;
}

Action TreePolicy::next() {
  switch (node_->kind) {
    case NodeKind::Question: {
      Ask ask{node_->text, node_->labels(), node_->feature, node_->pointed};
      return ask;
    }
    case NodeKind::Ambiguous:
      throw AmbiguousTarget(node_->covered);
    case NodeKind::Leaf:
      break;
  }
  if (moves_.empty() && moves_done_ == 0) moves_ = removal_order(*scene_, node_->text);
  if (moves_done_ < moves_.size()) return MoveAway{moves_[moves_done_++]};
  return Deliver{node_->text};
}

void TreePolicy::observe(const std::string& answer) {
  if (!node_->is_question()) return;
  if (const Branch* b = find_branch(*node_, answer)) {
    node_ = &b->node;
    path_.push_back(b->label);
  }
}

std::vector<std::string> TreePolicy::take_warnings() { return std::exchange(warnings_, {}); }

nlohmann::json TreePolicy::partial_tree() const { return visited(tree_.root, path_, 0); }

LlmPolicy::LlmPolicy(PolicyOptions options) : options_(std::move(options)) {
  if (!options_.client_factory) throw std::invalid_argument("llm planner needs a chat client");
}

void LlmPolicy::begin(const Scene& scene, const Inquiry& inquiry, const CandidateSet&) {
  client_ = options_.client_factory();
  messages_ = render_prompt(options_.prompt, scene.description, inquiry.text);
  query();
}

void LlmPolicy::query() {
  const std::string first = client_->complete(messages_);
  plan_ = repair_loop(options_.llm, *client_, messages_, first);
  for (const auto& w : plan_->warnings) warnings_.push_back(w);
  level_ = &plan_->plan;
  step_ = 0;
}

const PlanStep* LlmPolicy::current_step() const {
  if (!level_ || step_ >= level_->steps.size()) return nullptr;
  return &level_->steps[step_];
}

Action LlmPolicy::next() {
  const PlanStep* s = current_step();
  if (!s) throw PlannerFailure("plan ended without a delivery", {});
  if (std::holds_alternative<Ask>(s->action)) return s->action;
  ++step_;
  return s->action;
}

void LlmPolicy::observe(const std::string& answer) {
  const PlanStep* s = current_step();
  if (!s || !std::holds_alternative<Ask>(s->action)) return;

  if (options_.mode == PlannerMode::Incremental) {
    path_.push_back(answer);
    messages_.push_back({"assistant", plan_->response});
    messages_.push_back({"user", "User response: \"" + answer + "\""});
    query();
    return;
  }

  const bool last = step_ + 1 == level_->steps.size();
  if (!last || level_->options.empty()) {
    ++step_;
    return;
  }
  if (text::normalize(answer) == kNoneOfThose) return;
  const std::string n = text::normalize(unwrap_angle(answer));
  for (const auto& option : level_->options) {
    if (option.label == answer || text::normalize(option.label) == n) {
      path_.push_back(option.label);
      level_ = &option.plan;
      step_ = 0;
      return;
    }
  }
  warnings_.push_back("answer '" + answer + "' matches no option of the plan");
}

std::vector<std::string> LlmPolicy::take_warnings() { return std::exchange(warnings_, {}); }

nlohmann::json LlmPolicy::partial_tree() const {
  if (!plan_) return nullptr;
  if (options_.mode == PlannerMode::Incremental) return visited(plan_->plan_tree.root, {}, 0);
  return visited(plan_->plan_tree.root, path_, 0);
}

std::unique_ptr<PlannerPolicy> make_policy(PlannerKind kind, const PolicyOptions& options) {
  if (kind == PlannerKind::Llm) return std::make_unique<LlmPolicy>(options);
  return std::make_unique<TreePolicy>(kind, options);
}

}  // namespace disambig
