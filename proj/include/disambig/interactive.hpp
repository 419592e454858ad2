#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "disambig/session.hpp"

namespace disambig {

// Maps typed input to one of `options`: a 1-based number, the label itself
// (any case), "none" for kNoneOfThose, or the single option containing the
// typed words.
std::optional<std::string> match_typed_answer(const std::string& typed,
                                              const std::vector<std::string>& options);

// The planner asks, a human answers on `in`. EOF aborts as Failed.
SessionResult run_answerer(const Scene& scene, const Inquiry& inquiry,
                           std::unique_ptr<PlannerPolicy> policy, std::istream& in,
                           std::ostream& out);

// A human asks free-text questions about a hidden target and finally names
// an object. Questions that name exactly one candidate by its display name
// act as pointing queries and deliver it when the answer is yes.
class QuestionerGame {
 public:
  QuestionerGame(const Scene& scene, const Inquiry& inquiry, ObjectId hidden_target,
                 SessionOptions options = {});

  struct Reply {
    std::string answer;  // "yes", "no", or a delivery message
    bool finished = false;
  };

  Reply ask(const std::string& question);
  Reply deliver(const std::string& phrase);
  void abort(const std::string& reason);

  bool finished() const { return finished_; }
  int queries() const { return queries_; }
  int budget() const { return budget_; }
  const CandidateSet& candidates() const { return candidates_; }
  const std::vector<SessionEvent>& transcript() const { return transcript_; }
  // Reveals the target only once finished.
  SessionResult result() const;

 private:
  Reply finish_with(const ObjectId& id, const std::string& phrase);

  const Scene* scene_;
  CandidateSet candidates_;
  ObjectId target_;
  int budget_;
  int queries_ = 0;
  bool finished_ = false;
  std::optional<ObjectId> delivered_;
  std::string failure_reason_;
  std::vector<SessionEvent> transcript_;
};

// Lines starting with "deliver " name the object; anything else is a question.
SessionResult run_questioner(const Scene& scene, const Inquiry& inquiry, const ObjectId& hidden_target,
                             std::istream& in, std::ostream& out);

}  // namespace disambig
