#include "disambig/llm_planner.hpp"

#include <spdlog/spdlog.h>

namespace disambig {

std::string to_token(PlannerMode mode) {
  return mode == PlannerMode::WholePlan ? "whole" : "incremental";
}

PlannerMode planner_mode_from_token(const std::string& token) {
  if (token == "whole" || token == "whole_plan") return PlannerMode::WholePlan;
  if (token == "incremental") return PlannerMode::Incremental;
  throw std::invalid_argument("unknown mode '" + token + "' (expected whole or incremental)");
}

PlanResult plan_from_response(std::string_view text) {
  PlanResult out;
  out.response = std::string(text);
  ExtractedDocuments docs;
  try {
    docs = extract_documents(text);
  } catch (const ExtractionError& e) {
    const char* block = e.block() == DocumentBlock::ActionPlanner ? "Action Planner" : "Decision Tree";
    throw ResponseError(std::string(block) + " block: " + e.what(), e.offset());
  }
  try {
    out.plan = plan_from_doc(docs.planner);
    out.plan_tree = plan_to_tree(out.plan);
  } catch (const ParseError& e) {
    throw ResponseError(std::string("Action Planner block: ") + e.what(), std::nullopt);
  } catch (const PlanError& e) {
    throw ResponseError(std::string("Action Planner block: ") + e.what(), std::nullopt);
  }
  try {
    out.declared_tree = normalize_nested_tree(docs.tree);
  } catch (const TreeDocError& e) {
    throw ResponseError(std::string("Decision Tree block: ") + e.what(), std::nullopt);
  }
  if (shape_signature(out.plan_tree.root) != shape_signature(out.declared_tree.root)) {
    out.warnings.push_back(
        "Decision Tree block disagrees with the Action Planner; following the Action Planner");
  }
  return out;
}

std::string repair_message(const std::string& error) {
  return "Your previous response could not be used: " + error +
         ". Reply again with an \"Action Planner:\" block and a \"Decision Tree:\" block in the "
         "template format, with every brace and bracket closed.";
}

PlanResult repair_loop(const LLMConfig& config, ChatClient& client,
                       std::vector<ChatMessage>& messages, const std::string& first_response) {
  std::vector<PlanAttempt> attempts;
  std::string response = first_response;
  for (int i = 0;; ++i) {
    try {
      PlanResult r = plan_from_response(response);
      return r;
    } catch (const ResponseError& e) {
      attempts.push_back({response, e.what()});
      if (i >= config.max_retries) {
        throw PlannerFailure("no usable plan after " + std::to_string(attempts.size()) +
                                 " attempts: " + e.what(),
                             std::move(attempts));
      }
      spdlog::debug("repairing response: {}", e.what());
      messages.push_back({"assistant", response});
      messages.push_back({"user", repair_message(e.what())});
    }
    try {
      response = client.complete(messages);
    } catch (const ConfigurationError&) {
      throw;
    } catch (const AuthenticationError&) {
      throw;
    } catch (const LlmError& e) {
      attempts.push_back({"", e.what()});
      throw PlannerFailure(e.what(), std::move(attempts));
    }
  }
}

}  // namespace disambig
