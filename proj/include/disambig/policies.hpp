#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "disambig/llm_planner.hpp"
#include "disambig/planners.hpp"
#include "disambig/prompt.hpp"
#include "disambig/session.hpp"

namespace disambig {

struct PolicyOptions {
  PlannerConfig config;
  CostModel cost_model = CostModel::Expected;
  AttrLimitConfig attr;
  // LLM planner only.
  PromptTemplate prompt;
  ChatClientFactory client_factory;
  LLMConfig llm;
  PlannerMode mode = PlannerMode::WholePlan;
};

// Builds a full tree in begin() and walks it. Exact search falls back to
// greedy (with a warning) above the exact limit.
class TreePolicy : public PlannerPolicy {
 public:
  TreePolicy(PlannerKind kind, PolicyOptions options);

  std::string name() const override { return to_token(kind_); }
  void begin(const Scene& scene, const Inquiry& inquiry, const CandidateSet& candidates) override;
  Action next() override;
  void observe(const std::string& answer) override;
  std::vector<std::string> take_warnings() override;
  nlohmann::json partial_tree() const override;

  const DecisionTree& tree() const { return tree_; }

 private:
  PlannerKind kind_;
  PolicyOptions options_;
  const Scene* scene_ = nullptr;
  DecisionTree tree_;
  const TreeNode* node_ = nullptr;
  std::vector<std::string> path_;  // answers taken
  std::vector<ObjectId> moves_;
  std::size_t moves_done_ = 0;
  std::vector<std::string> warnings_;
};

// Drives the chat model. Whole-plan mode traverses the first accepted plan;
// incremental mode asks the model again after every answer.
class LlmPolicy : public PlannerPolicy {
 public:
  explicit LlmPolicy(PolicyOptions options);

  std::string name() const override { return "llm"; }
  void begin(const Scene& scene, const Inquiry& inquiry, const CandidateSet& candidates) override;
  Action next() override;
  void observe(const std::string& answer) override;
  bool deterministic() const override { return options_.llm.temperature == 0.0; }
  std::vector<std::string> take_warnings() override;
  std::size_t completions() const override { return client_ ? client_->call_count() : 0; }
  nlohmann::json partial_tree() const override;

  const std::optional<PlanResult>& plan() const { return plan_; }

 private:
  void query();
  const PlanStep* current_step() const;

  PolicyOptions options_;
  std::unique_ptr<ChatClient> client_;
  std::vector<ChatMessage> messages_;
  std::string last_response_;
  std::optional<PlanResult> plan_;
  const ActionPlan* level_ = nullptr;
  std::size_t step_ = 0;
  std::vector<std::string> path_;
  std::vector<std::string> warnings_;
};

std::unique_ptr<PlannerPolicy> make_policy(PlannerKind kind, const PolicyOptions& options);

}  // namespace disambig
