#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "disambig/action.hpp"
#include "disambig/oracle.hpp"
#include "disambig/scene.hpp"

namespace disambig {

// Raised by a policy that reached a set of candidates it cannot tell apart.
class AmbiguousTarget : public std::runtime_error {
 public:
  explicit AmbiguousTarget(std::vector<ObjectId> remaining)
      : std::runtime_error("cannot tell apart " + std::to_string(remaining.size()) + " objects"),
        remaining_(std::move(remaining)) {}
  const std::vector<ObjectId>& remaining() const noexcept { return remaining_; }

 private:
  std::vector<ObjectId> remaining_;
};

// Source of actions for a session. Policies throw PlannerFailure or
// AmbiguousTarget from begin()/next() when they cannot continue.
class PlannerPolicy {
 public:
  virtual ~PlannerPolicy() = default;
  virtual std::string name() const = 0;
  virtual void begin(const Scene& scene, const Inquiry& inquiry, const CandidateSet& candidates) = 0;
  virtual Action next() = 0;
  // The user's answer to the last Ask, possibly kNoneOfThose.
  virtual void observe(const std::string& answer) = 0;
  virtual bool deterministic() const { return true; }
  virtual std::vector<std::string> take_warnings() { return {}; }
  virtual std::size_t completions() const { return 0; }
  // Question-node path taken so far, as a JSON tree fragment (may be null).
  virtual nlohmann::json partial_tree() const { return nullptr; }
};

enum class SessionState { Planning, AwaitingAnswer, Executing, Delivered, Failed };
std::string to_string(SessionState state);

enum class EventKind { Ask, Answer, MoveAway, Deliver, Warning };
std::string to_string(EventKind kind);

struct SessionEvent {
  EventKind kind;
  std::string text;
  std::vector<std::string> options;  // Ask only
  std::optional<ObjectId> object;    // resolved object of MoveAway / Deliver

  friend bool operator==(const SessionEvent&, const SessionEvent&) = default;
};

struct SessionOptions {
  int budget = 0;  // 0 means twice the candidate count
  int max_unproductive = 3;
};

struct SessionResult {
  bool success = false;
  std::optional<ObjectId> delivered;
  int queries = 0;
  int unproductive_queries = 0;
  bool move_order_valid = true;
  bool ambiguous = false;  // failed at a set of indistinguishable objects
  std::string failure_reason;
  std::vector<SessionEvent> transcript;
};

class Session {
 public:
  Session(const Scene& scene, Inquiry inquiry, std::unique_ptr<PlannerPolicy> policy,
          SessionOptions options = {});

  // Runs until the first question or a terminal state.
  void start();
  // Requires AwaitingAnswer. `answer` is an option label or kNoneOfThose.
  void answer(const std::string& answer);
  // Ends the session as Failed (e.g. the human walked away).
  void abort(const std::string& reason);

  SessionState state() const { return state_; }
  bool finished() const { return state_ == SessionState::Delivered || state_ == SessionState::Failed; }
  const std::optional<Ask>& pending() const { return pending_; }
  std::vector<std::string> pending_options() const;
  const std::vector<SessionEvent>& transcript() const { return transcript_; }
  int query_count() const { return queries_; }
  int budget() const { return budget_; }
  const CandidateSet& candidates() const { return candidates_; }
  const Scene& scene() const { return *scene_; }
  const Inquiry& inquiry() const { return inquiry_; }
  const PlannerPolicy& policy() const { return *policy_; }

  // Success is judged against `hidden_target` when given.
  SessionResult result(const std::optional<ObjectId>& hidden_target = std::nullopt) const;

 private:
  void advance();
  void fail(const std::string& reason);
  void drain_warnings();
  void execute_move(const MoveAway& move);
  void execute_deliver(const Deliver& deliver);

  const Scene* scene_;
  Inquiry inquiry_;
  std::unique_ptr<PlannerPolicy> policy_;
  CandidateSet candidates_;
  SessionState state_ = SessionState::Planning;
  std::optional<Ask> pending_;
  std::vector<SessionEvent> transcript_;
  std::vector<ObjectId> moved_;
  std::optional<ObjectId> delivered_;
  int queries_ = 0;
  int budget_ = 0;
  int max_unproductive_ = 3;
  int unproductive_ = 0;
  int consecutive_unproductive_ = 0;
  bool move_order_valid_ = true;
  bool ambiguous_ = false;
  bool started_ = false;
  std::string failure_reason_;
};

SessionResult run_session(std::unique_ptr<PlannerPolicy> policy, const Scene& scene,
                          const Inquiry& inquiry, const UserOracle& oracle,
                          SessionOptions options = {});

nlohmann::ordered_json to_json(const SessionEvent& event);
nlohmann::ordered_json to_json(const SessionResult& result);

// One line per event, e.g. "<ask> <Which color is it: blue or green?>" and
// "answer: blue".
std::string format_transcript(const std::vector<SessionEvent>& events);

}  // namespace disambig
