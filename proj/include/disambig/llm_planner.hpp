#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "disambig/llm_client.hpp"
#include "disambig/plan.hpp"

namespace disambig {

enum class PlannerMode { WholePlan, Incremental };

std::string to_token(PlannerMode mode);
// "whole" or "incremental"; throws std::invalid_argument.
PlannerMode planner_mode_from_token(const std::string& token);

struct PlanResult {
  ActionPlan plan;
  DecisionTree plan_tree;      // derived from the Action Planner (authoritative)
  DecisionTree declared_tree;  // the Decision Tree block as written
  std::vector<std::string> warnings;
  std::string response;  // the text the plan was read from
};

// Any failure to turn a response into a plan. `offset` points into the
// response when the failure has a position.
class ResponseError : public std::runtime_error {
 public:
  ResponseError(const std::string& what, std::optional<std::size_t> offset)
      : std::runtime_error(what), offset_(offset) {}
  std::optional<std::size_t> offset() const noexcept { return offset_; }

 private:
  std::optional<std::size_t> offset_;
};

// Throws ResponseError.
PlanResult plan_from_response(std::string_view text);

struct PlanAttempt {
  std::string response;
  std::string error;  // empty for the accepted attempt
};

class PlannerFailure : public std::runtime_error {
 public:
  PlannerFailure(const std::string& what, std::vector<PlanAttempt> attempts)
      : std::runtime_error(what), attempts_(std::move(attempts)) {}
  const std::vector<PlanAttempt>& attempts() const noexcept { return attempts_; }

 private:
  std::vector<PlanAttempt> attempts_;
};

std::string repair_message(const std::string& error);

// Parses `first_response`; on failure appends it and a corrective user turn
// to `messages` and asks `client` again, up to config.max_retries times.
PlanResult repair_loop(const LLMConfig& config, ChatClient& client,
                       std::vector<ChatMessage>& messages, const std::string& first_response);

}  // namespace disambig
