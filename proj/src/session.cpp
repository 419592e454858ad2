#include "disambig/session.hpp"

#include <algorithm>
#include <sstream>

#include "disambig/llm_planner.hpp"
#include "disambig/text.hpp"

namespace disambig {

std::string to_string(SessionState state) {
  switch (state) {
    case SessionState::Planning: return "planning";
    case SessionState::AwaitingAnswer: return "awaiting_answer";
    case SessionState::Executing: return "executing";
    case SessionState::Delivered: return "delivered";
    case SessionState::Failed: return "failed";
  }
  return "unknown";
}

std::string to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Ask: return "ask";
    case EventKind::Answer: return "answer";
    case EventKind::MoveAway: return "move_away";
    case EventKind::Deliver: return "deliver";
    case EventKind::Warning: return "warning";
  }
  return "unknown";
}

Session::Session(const Scene& scene, Inquiry inquiry, std::unique_ptr<PlannerPolicy> policy,
                 SessionOptions options)
    : scene_(&scene), inquiry_(std::move(inquiry)), policy_(std::move(policy)) {
  candidates_ = candidates_for_inquiry(scene, inquiry_);
  budget_ = options.budget > 0 ? options.budget : 2 * static_cast<int>(candidates_.size());
  max_unproductive_ = options.max_unproductive;
}

std::vector<std::string> Session::pending_options() const {
  return pending_ ? answer_options(*pending_) : std::vector<std::string>{};
}

void Session::fail(const std::string& reason) {
  state_ = SessionState::Failed;
  pending_.reset();
  failure_reason_ = reason;
}

void Session::abort(const std::string& reason) {
  if (!finished()) fail(reason);
}

void Session::drain_warnings() {
  for (auto& w : policy_->take_warnings()) transcript_.push_back({EventKind::Warning, w, {}, {}});
}

namespace {

// Runs `step`, turning planner-side failures into a failure reason.
template <typename F>
std::optional<std::string> guarded(F&& step, bool& ambiguous) {
  try {
    step();
  } catch (const AmbiguousTarget& e) {
    ambiguous = true;
    return std::string(e.what());
  } catch (const ConfigurationError&) {
    throw;
  } catch (const AuthenticationError&) {
    throw;
  } catch (const std::exception& e) {
    return std::string(e.what());
  }
  return std::nullopt;
}

}  // namespace

void Session::start() {
  if (started_) return;
  started_ = true;
  if (auto err = guarded([&] { policy_->begin(*scene_, inquiry_, candidates_); }, ambiguous_)) {
    drain_warnings();
    fail(*err);
    return;
  }
  drain_warnings();
  advance();
}

void Session::advance() {
  while (!finished() && state_ != SessionState::AwaitingAnswer) {
    Action action;
    if (auto err = guarded([&] { action = policy_->next(); }, ambiguous_)) {
      drain_warnings();
      fail(*err);
      return;
    }
    drain_warnings();
    if (const auto* ask = std::get_if<Ask>(&action)) {
      if (queries_ >= budget_) {
        fail("query budget of " + std::to_string(budget_) + " exhausted");
        return;
      }
      state_ = SessionState::Planning;
      transcript_.push_back({EventKind::Ask, ask->question, answer_options(*ask), ask->pointed});
      pending_ = *ask;
      ++queries_;
      state_ = SessionState::AwaitingAnswer;
    } else if (const auto* move = std::get_if<MoveAway>(&action)) {
      state_ = SessionState::Executing;
      execute_move(*move);
    } else {
      state_ = SessionState::Executing;
      execute_deliver(std::get<Deliver>(action));
    }
  }
}

void Session::answer(const std::string& answer) {
  if (state_ != SessionState::AwaitingAnswer) {
    throw std::logic_error("session is not waiting for an answer");
  }
  transcript_.push_back({EventKind::Answer, answer, {}, {}});
  pending_.reset();
  if (text::normalize(answer) == kNoneOfThose) {
    ++unproductive_;
    if (++consecutive_unproductive_ >= max_unproductive_) {
      fail(std::to_string(consecutive_unproductive_) + " consecutive questions went unanswered");
      return;
    }
  } else {
    consecutive_unproductive_ = 0;
  }
  state_ = SessionState::Planning;
  if (auto err = guarded([&] { policy_->observe(answer); }, ambiguous_)) {
    drain_warnings();
    fail(*err);
    return;
  }
  advance();
}

void Session::execute_move(const MoveAway& move) {
  std::vector<ObjectId> ids;
  if (auto id = resolve_object_strict(*scene_, move.object_phrase)) {
    ids.push_back(*id);
  } else if (const auto at = text::normalize(move.object_phrase).find("on top of ");
             at != std::string::npos) {
    // "<things> on top of <object>": everything resting on that object.
    const std::string base = text::normalize(move.object_phrase).substr(at + 10);
    std::vector<ObjectId> pool;
    for (const auto& o : scene_->objects) pool.push_back(o.id);
    if (auto below = resolve_object_phrase(*scene_, base, pool)) {
      for (const auto& id : removal_order(*scene_, *below)) {
        if (std::find(moved_.begin(), moved_.end(), id) == moved_.end()) ids.push_back(id);
      }
    }
  }
  if (ids.empty()) {
    transcript_.push_back({EventKind::MoveAway, move.object_phrase, {}, std::nullopt});
    transcript_.push_back(
        {EventKind::Warning, "could not identify '" + move.object_phrase + "' to move", {}, {}});
    return;
  }
  transcript_.push_back(
      {EventKind::MoveAway, move.object_phrase, {}, ids.size() == 1 ? std::optional(ids[0]) : std::nullopt});
  for (const auto& id : ids) {
    for (const auto& above : objects_above(*scene_, id)) {
      if (std::find(moved_.begin(), moved_.end(), above) == moved_.end()) {
        move_order_valid_ = false;
        transcript_.push_back({EventKind::Warning, "moved " + id + " while " + above + " rests on it", {}, {}});
      }
    }
    moved_.push_back(id);
  }
}

void Session::execute_deliver(const Deliver& deliver) {
  std::vector<ObjectId> pool(candidates_.begin(), candidates_.end());
  auto id = resolve_object_phrase(*scene_, deliver.object_phrase, pool);
  if (!id) {
    transcript_.push_back({EventKind::Deliver, deliver.object_phrase, {}, std::nullopt});
    fail("could not identify '" + deliver.object_phrase + "' among the candidates");
    return;
  }
  transcript_.push_back({EventKind::Deliver, deliver.object_phrase, {}, id});
  for (const auto& above : removal_order(*scene_, *id)) {
    if (std::find(moved_.begin(), moved_.end(), above) == moved_.end()) {
      move_order_valid_ = false;
      transcript_.push_back({EventKind::Warning, above + " still rests on " + *id, {}, {}});
    }
  }
  delivered_ = id;
  state_ = SessionState::Delivered;
}

SessionResult Session::result(const std::optional<ObjectId>& hidden_target) const {
  SessionResult r;
  r.delivered = delivered_;
  r.queries = queries_;
  r.unproductive_queries = unproductive_;
  r.move_order_valid = move_order_valid_;
  r.ambiguous = ambiguous_;
  r.failure_reason = failure_reason_;
  r.transcript = transcript_;
  r.success = state_ == SessionState::Delivered && move_order_valid_ &&
              (!hidden_target || delivered_ == hidden_target);
  if (state_ == SessionState::Delivered && !r.success && r.failure_reason.empty()) {
    r.failure_reason = move_order_valid_ ? "delivered the wrong object" : "objects were still stacked on the delivered one";
  }
  return r;
}

SessionResult run_session(std::unique_ptr<PlannerPolicy> policy, const Scene& scene,
                          const Inquiry& inquiry, const UserOracle& oracle, SessionOptions options) {
  Session s(scene, inquiry, std::move(policy), options);
  s.start();
  while (s.state() == SessionState::AwaitingAnswer) s.answer(oracle_answer(oracle, *s.pending()));
  return s.result(oracle.hidden_target);
}

nlohmann::ordered_json to_json(const SessionEvent& event) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(event.kind);
  j["text"] = event.text;
  if (event.kind == EventKind::Ask) j["options"] = event.options;
  if (event.object) j["object"] = *event.object;
  return j;
}

nlohmann::ordered_json to_json(const SessionResult& result) {
  nlohmann::ordered_json j;
  j["success"] = result.success;
  j["delivered"] = result.delivered ? nlohmann::ordered_json(*result.delivered) : nlohmann::ordered_json();
  j["queries"] = result.queries;
  j["unproductive_queries"] = result.unproductive_queries;
  j["move_order_valid"] = result.move_order_valid;
  j["ambiguous"] = result.ambiguous;
  if (!result.failure_reason.empty()) j["failure_reason"] = result.failure_reason;
  j["transcript"] = nlohmann::ordered_json::array();
  for (const auto& e : result.transcript) j["transcript"].push_back(to_json(e));
  return j;
}

std::string format_transcript(const std::vector<SessionEvent>& events) {
  std::ostringstream out;
  for (const auto& e : events) {
    switch (e.kind) {
      case EventKind::Ask: out << "<ask> <" << e.text << ">\n"; break;
      case EventKind::Answer: out << "answer: " << e.text << "\n"; break;
      case EventKind::MoveAway: out << "<move away> <" << e.text << ">\n"; break;
      case EventKind::Deliver: out << "<deliver> <" << e.text << ">\n"; break;
      case EventKind::Warning: out << "warning: " << e.text << "\n"; break;
    }
  }
  return out.str();
}

}  // namespace disambig
