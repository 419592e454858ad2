#include "disambig/interactive.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <ostream>

#include "disambig/text.hpp"

namespace disambig {

std::optional<std::string> match_typed_answer(const std::string& typed,
                                              const std::vector<std::string>& options) {
  const std::string t = text::trim(typed);
  if (t.empty()) return std::nullopt;
  if (std::all_of(t.begin(), t.end(), [](unsigned char c) { return std::isdigit(c); }) && t.size() < 6) {
    const std::size_t n = std::stoul(t);
    if (n >= 1 && n <= options.size()) return options[n - 1];
    return std::nullopt;
  }
  const std::string n = text::normalize(t);
  if (n == "none" || n == kNoneOfThose) return std::string(kNoneOfThose);
  for (const auto& o : options) {
    if (text::normalize(o) == n) return o;
  }
  std::optional<std::string> found;
  for (const auto& o : options) {
    if (text::contains_phrase(text::normalize(o), n)) {
      if (found) return std::nullopt;
      found = o;
    }
  }
  return found;
}

SessionResult run_answerer(const Scene& scene, const Inquiry& inquiry,
                           std::unique_ptr<PlannerPolicy> policy, std::istream& in,
                           std::ostream& out) {
  Session session(scene, inquiry, std::move(policy));
  out << scene.description << "\n" << "Inquiry: " << inquiry.text << "\n";
  session.start();
  std::size_t shown = 0;
  auto show_events = [&] {
    const auto& events = session.transcript();
    for (; shown < events.size(); ++shown) {
      const auto& e = events[shown];
      switch (e.kind) {
        case EventKind::MoveAway: out << "<move away> <" << e.text << ">\n"; break;
        case EventKind::Deliver: out << "<deliver> <" << e.text << ">\n"; break;
        case EventKind::Warning: out << "warning: " << e.text << "\n"; break;
        default: break;
      }
    }
  };
  while (session.state() == SessionState::AwaitingAnswer) {
    show_events();
    const auto options = session.pending_options();
    out << "<ask> <" << session.pending()->question << ">\n";
    for (std::size_t i = 0; i < options.size(); ++i) out << "  " << i + 1 << ") " << options[i] << "\n";
    std::optional<std::string> answer;
    std::string line;
    while (!answer) {
      out << "> " << std::flush;
      if (!std::getline(in, line)) {
        session.abort("input ended before the session finished");
        break;
      }
      answer = match_typed_answer(line, options);
      if (!answer) out << "Please answer with one of: " << text::join(options, ", ") << " (or none)\n";
    }
    if (!answer) break;
    session.answer(*answer);
  }
  show_events();
  const SessionResult r = session.result();
  if (session.state() == SessionState::Delivered && r.delivered) {
    out << "Delivered: " << scene.object(*r.delivered).display_name << "\n";
  } else {
    out << "Session failed: " << r.failure_reason << "\n";
  }
  return r;
}

QuestionerGame::QuestionerGame(const Scene& scene, const Inquiry& inquiry, ObjectId hidden_target,
                               SessionOptions options)
    : scene_(&scene), candidates_(candidates_for_inquiry(scene, inquiry)), target_(std::move(hidden_target)) {
  if (!candidates_.count(target_)) throw std::invalid_argument("hidden target is not a candidate");
  budget_ = options.budget > 0 ? options.budget : 2 * static_cast<int>(candidates_.size());
}

QuestionerGame::Reply QuestionerGame::finish_with(const ObjectId& id, const std::string& phrase) {
  transcript_.push_back({EventKind::Deliver, phrase, {}, id});
  delivered_ = id;
  finished_ = true;
  return {"Delivered the " + scene_->object(id).display_name + ".", true};
}

QuestionerGame::Reply QuestionerGame::ask(const std::string& question) {
  if (finished_) throw std::logic_error("game is over");
  if (queries_ >= budget_) {
    abort("query budget of " + std::to_string(budget_) + " exhausted");
    return {"No questions left.", true};
  }
  ++queries_;
  transcript_.push_back({EventKind::Ask, question, {"yes", "no"}, std::nullopt});
  const bool holds = free_question_holds(*scene_, target_, question);
  const std::string answer = holds ? "yes" : "no";
  transcript_.push_back({EventKind::Answer, answer, {}, std::nullopt});

  // A question naming one candidate outright is a pointing query.
  std::string q = text::trim(question);
  while (!q.empty() && q.back() == '?') q.pop_back();
  const std::string n = text::normalize(q);
  std::optional<ObjectId> named;
  int count = 0;
  for (const auto& id : candidates_) {
    if (text::contains_phrase(n, text::normalize(scene_->object(id).display_name))) {
      named = id;
      ++count;
    }
  }
  if (holds && count == 1 && *named == target_) return finish_with(*named, question);
  return {answer, false};
}

QuestionerGame::Reply QuestionerGame::deliver(const std::string& phrase) {
  if (finished_) throw std::logic_error("game is over");
  const auto id = resolve_object_phrase(*scene_, phrase, {candidates_.begin(), candidates_.end()});
  if (!id) return {"Which one? '" + phrase + "' does not name a single candidate.", false};
  return finish_with(*id, phrase);
}

void QuestionerGame::abort(const std::string& reason) {
  if (finished_) return;
  finished_ = true;
  failure_reason_ = reason;
}

SessionResult QuestionerGame::result() const {
  SessionResult r;
  r.queries = queries_;
  r.transcript = transcript_;
  r.delivered = delivered_;
  r.success = finished_ && delivered_ == target_;
  r.failure_reason = failure_reason_;
  if (delivered_ && !r.success) r.failure_reason = "delivered the wrong object";
  return r;
}

SessionResult run_questioner(const Scene& scene, const Inquiry& inquiry, const ObjectId& hidden_target,
                             std::istream& in, std::ostream& out) {
  QuestionerGame game(scene, inquiry, hidden_target);
  out << scene.description << "\n"
      << "Inquiry: " << inquiry.text << "\n"
      << "I picked one of " << game.candidates().size()
      << " objects. Ask yes/no questions, then type 'deliver <object>'.\n";
  std::string line;
  while (!game.finished()) {
    out << "> " << std::flush;
    if (!std::getline(in, line)) {
      game.abort("input ended before the session finished");
      break;
    }
    const std::string t = text::trim(line);
    if (t.empty()) continue;
    const auto reply = text::to_lower(t).starts_with("deliver ") ? game.deliver(t.substr(8)) : game.ask(t);
    out << reply.answer << "\n";
  }
  const SessionResult r = game.result();
  out << (r.success ? "Correct: " : "The object was: ") << scene.object(hidden_target).display_name << "\n";
  return r;
}

}  // namespace disambig
