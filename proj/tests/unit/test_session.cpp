#include <doctest.h>

#include "disambig/oracle.hpp"
#include "disambig/planners.hpp"
#include "disambig/policies.hpp"
#include "disambig/session.hpp"
#include "unit/helpers.hpp"

using namespace disambig;
using testing_support::bundled_corpus;
using testing_support::scene;

namespace {

std::shared_ptr<const MockScript> bundled_mock() {
  static const auto script =
      std::make_shared<const MockScript>(MockScript::load(DISAMBIG_DATA_DIR "/mock/fewshot_mock.json"));
  return script;
}

PolicyOptions llm_options(std::shared_ptr<const MockScript> script, PlannerMode mode = PlannerMode::WholePlan) {
  PolicyOptions o;
  o.prompt = load_prompt_template(DISAMBIG_DATA_DIR "/prompts", true);
  o.client_factory = mock_client_factory(std::move(script));
  o.mode = mode;
  return o;
}

SessionResult run(PlannerKind kind, const Scene& s, const ObjectId& target, std::size_t inquiry = 0,
                  SessionOptions so = {}, PolicyOptions po = {}) {
  return run_session(make_policy(kind, po), s, s.inquiries[inquiry], UserOracle(s, target), so);
}

std::vector<EventKind> kinds(const SessionResult& r) {
  std::vector<EventKind> out;
  for (const auto& e : r.transcript) out.push_back(e.kind);
  return out;
}

// Keeps asking about a feature value nobody has.
class StubbornPolicy : public PlannerPolicy {
 public:
  std::string name() const override { return "stubborn"; }
  void begin(const Scene&, const Inquiry&, const CandidateSet&) override {}
  Action next() override { return Ask{"Is it the purple one or the orange one?", {"purple one", "orange one"}, {}, {}}; }
  void observe(const std::string& answer) override { answers.push_back(answer); }
  std::vector<std::string> answers;
};

}  // namespace

TEST_CASE("oracle answers") {
  const Scene& c = scene("cups_line");
  const UserOracle small_green(c, "cup_2");
  CHECK(oracle_answer(small_green, Ask{"Which color is it: blue or green?", {"blue", "green"}, {}, {}}) == "green");
  CHECK(oracle_answer(small_green, Ask{"Would you like a blue cup or a green cup?", {}, {}, {}}) == "a green cup");
  CHECK(oracle_answer(small_green, Ask{"Which one?", {"large green cup", "small green cup"}, {}, {}}) ==
        "small green cup");
  CHECK(oracle_answer(small_green, Ask{"Which one?", {"red", "yellow"}, {}, {}}) == kNoneOfThose);
  CHECK(oracle_answer(small_green, Ask{"Is it the small green cup?", {}, {}, ObjectId("cup_2")}) == "yes");
  CHECK(oracle_answer(small_green, Ask{"Is it the large blue cup?", {}, {}, ObjectId("cup_1")}) == "no");
  CHECK_THROWS_AS(UserOracle(c, "cup_9"), UnknownObject);

  const Scene& p = scene("plum_pyramid");
  // The other row is named outside the matched side.
  CHECK_FALSE(match_option(p, "b_back_right", "left plum of the back row").accepted());
  CHECK(match_option(p, "b_back_left", "left plum of the back row").accepted());
  CHECK(oracle_answer(UserOracle(p, "b_back_left"),
                      Ask{"Which plum?", {"front row", "middle row", "back row"}, {}, {}}) == "back row");
}

TEST_CASE("phrase resolution") {
  const Scene& b = scene("breakfast_table");
  const std::vector<ObjectId> pool{"chocolate_left", "chocolate_right", "apple"};
  CHECK(resolve_object_phrase(b, "left chocolate bar", pool) == std::optional<ObjectId>("chocolate_left"));
  CHECK(resolve_object_phrase(b, "the apple", pool) == std::optional<ObjectId>("apple"));
  CHECK(resolve_object_phrase(b, "chocolate bar", pool) == std::nullopt);
  CHECK(resolve_object_strict(b, "toothbrush") == std::optional<ObjectId>("toothbrush"));
  CHECK(resolve_object_strict(b, "brush") == std::nullopt);
}

TEST_CASE("golden transcript for the few-shot example") {
  const Scene& b = scene("breakfast_table");
  const auto once = [&] {
    return run_session(make_policy(PlannerKind::Llm, llm_options(bundled_mock())), b, b.inquiries[0],
                       UserOracle(b, "chocolate_left"));
  };
  const SessionResult r = once();
  CHECK(r.success);
  CHECK(r.queries == 2);
  CHECK(kinds(r) == std::vector<EventKind>{EventKind::Ask, EventKind::Answer, EventKind::Ask, EventKind::Answer,
                                           EventKind::Deliver});
  CHECK(r.delivered == std::optional<ObjectId>("chocolate_left"));
  const std::string text = format_transcript(r.transcript);
  CHECK(text == format_transcript(once().transcript));
  CHECK(text == testing_support::fixture("golden_breakfast_transcript.txt"));
}

TEST_CASE("few-shot plan handles the apple under the toothbrush") {
  const Scene& b = scene("breakfast_table");
  const SessionResult r = run_session(make_policy(PlannerKind::Llm, llm_options(bundled_mock())), b,
                                      b.inquiries[0], UserOracle(b, "apple"));
  CHECK(r.success);
  CHECK(r.queries == 1);
  CHECK(r.move_order_valid);
  REQUIRE(r.transcript.size() == 4);
  CHECK(r.transcript[2].kind == EventKind::MoveAway);
  CHECK(r.transcript[2].object == std::optional<ObjectId>("toothbrush"));
}

TEST_CASE("pyramid with the few-shot mock") {
  const Scene& p = scene("plum_pyramid");
  const SessionResult r = run_session(make_policy(PlannerKind::Llm, llm_options(bundled_mock())), p,
                                      p.inquiries[0], UserOracle(p, "b_back_left"));
  CHECK(r.success);
  CHECK(r.queries == 3);
  CHECK(r.move_order_valid);
  CHECK(r.delivered == std::optional<ObjectId>("b_back_left"));
}

TEST_CASE("cups take exactly two questions") {
  const Scene& c = scene("cups_line");
  for (auto kind : {PlannerKind::Exact, PlannerKind::Greedy}) {
    for (const auto& o : c.objects) {
      const SessionResult r = run(kind, c, o.id);
      CHECK(r.success);
      CHECK(r.queries == 2);
    }
  }
}

TEST_CASE("a single candidate needs no questions") {
  const Scene& b = scene("breakfast_table");
  for (auto kind : {PlannerKind::Exact, PlannerKind::Greedy, PlannerKind::Enumeration, PlannerKind::AttrLimited}) {
    const SessionResult r = run(kind, b, "toothbrush", 1);
    CHECK(r.success);
    CHECK(r.queries == 0);
    CHECK(kinds(r) == std::vector<EventKind>{EventKind::Deliver});
  }
}

TEST_CASE("rule-based sessions follow their trees") {
  PolicyOptions po;
  po.config.allow_inferred = true;
  for (const auto& s : bundled_corpus().scenes) {
    for (std::size_t q = 0; q < s.inquiries.size(); ++q) {
      const CandidateSet c = candidates_for_inquiry(s, s.inquiries[q]);
      const DecisionTree tree = build_tree_exact(s, c, CostModel::Expected, po.config).tree;
      std::size_t index = 0;
      for (const auto& id : c) {
        INFO(s.id << " / " << id);
        const SessionResult exact = run(PlannerKind::Exact, s, id, q);
        CHECK(exact.success);
        CHECK(exact.move_order_valid);
        const TreePath path = path_for_target(tree, id, truthful_answerer(id));
        CHECK(static_cast<std::size_t>(exact.queries) == path.steps.size());

        const SessionResult en = run(PlannerKind::Enumeration, s, id, q);
        CHECK(en.success);
        CHECK(en.queries == enumeration_tree_queries(index, c.size()));
        ++index;
      }
    }
  }
}

TEST_CASE("stacked targets are dug out in order") {
  const Scene& p = scene("plum_pyramid");
  const SessionResult r = run(PlannerKind::Exact, p, "b_middle_middle");
  CHECK(r.success);
  CHECK(r.move_order_valid);
  std::vector<ObjectId> moved;
  for (const auto& e : r.transcript) {
    if (e.kind == EventKind::MoveAway) moved.push_back(*e.object);
  }
  CHECK(moved == removal_order(p, "b_middle_middle"));
  CHECK(moved.front() == "top");
}

TEST_CASE("budget") {
  const Scene& p = scene("plum_pyramid");
  const CandidateSet c = candidates_for_inquiry(p, p.inquiries[0]);
  CHECK(run(PlannerKind::Exact, p, "top").queries == 1);
  for (const auto& id : c) {
    bool succeeded = false;
    for (int budget = 1; budget <= 28; ++budget) {
      SessionOptions so;
      so.budget = budget;
      const bool ok = run(PlannerKind::Enumeration, p, id, 0, so).success;
      CHECK((ok || !succeeded));
      succeeded = succeeded || ok;
    }
    CHECK(succeeded);
  }
  SessionOptions tight;
  tight.budget = 1;
  const SessionResult r = run(PlannerKind::Exact, p, "b_back_left", 0, tight);
  CHECK_FALSE(r.success);
  CHECK(r.queries == 1);
  CHECK_FALSE(r.failure_reason.empty());
}

TEST_CASE("unproductive answers end the session") {
  const Scene& c = scene("cups_line");
  const SessionResult r =
      run_session(std::make_unique<StubbornPolicy>(), c, c.inquiries[0], UserOracle(c, "cup_1"));
  CHECK_FALSE(r.success);
  CHECK(r.queries == 3);
  CHECK(r.unproductive_queries == 3);
}

TEST_CASE("indistinguishable candidates fail as ambiguous") {
  const Scene& p = scene("plum_pyramid");
  const SessionResult r = run(PlannerKind::Greedy, p, "b_back_left");
  CHECK_FALSE(r.success);
  CHECK(r.ambiguous);
  CHECK(r.queries == 1);
  CHECK(run(PlannerKind::Greedy, p, "top").success);
}

TEST_CASE("incremental mode asks the model after every answer") {
  const Scene& c = scene("cups_line");
  auto script = std::make_shared<MockScript>();
  const std::string first = R"(Action Planner:
{
  target object: <cup>,
  reason: <four cups>,
  direction: <ask> <Would you like a blue cup or a green cup?>,
  reason: <two colors>,
  options: [
    <blue cup>: { target object: <blue cup>, reason: <blue>, direction: <deliver> <large blue cup>, reason: <x> },
    <green cup>: { target object: <green cup>, reason: <green>, direction: <deliver> <large green cup>, reason: <x> }
  ]
}
Decision Tree:
{ "cup": [ "blue cup", "green cup" ] })";
  const std::string second = R"(Action Planner:
{
  target object: <large blue cup> or <small blue cup>,
  reason: <two blue cups>,
  direction: <ask> <Would you like the large blue cup or the small blue cup?>,
  reason: <sizes differ>,
  options: [
    <large blue cup>: { target object: <large blue cup>, reason: <x>, direction: <deliver> <large blue cup>, reason: <x> },
    <small blue cup>: { target object: <small blue cup>, reason: <x>, direction: <deliver> <small blue cup>, reason: <x> }
  ]
}
Decision Tree:
{ "blue cup": [ "large blue cup", "small blue cup" ] })";
  const std::string third = R"(Action Planner:
{
  target object: <small blue cup>,
  reason: <the user said small>,
  direction: <deliver> <small blue cup>,
  reason: <nothing blocks it>
}
Decision Tree:
{ "blue cup": [ "small blue cup" ] })";
  script->add({std::nullopt, 0, {}, first});
  script->add({std::nullopt, 1, {}, second});
  script->add({std::nullopt, 2, {}, third});

  auto policy = make_policy(PlannerKind::Llm, llm_options(script, PlannerMode::Incremental));
  const PlannerPolicy* raw = policy.get();
  Session session(c, c.inquiries[0], std::move(policy));
  session.start();
  const UserOracle oracle(c, "cup_3");
  while (session.state() == SessionState::AwaitingAnswer) session.answer(oracle_answer(oracle, *session.pending()));
  const SessionResult r = session.result("cup_3");
  INFO(r.failure_reason);
  CHECK(r.success);
  CHECK(r.queries == 2);
  CHECK(raw->completions() == static_cast<std::size_t>(r.queries) + 1);
}

TEST_CASE("planner failures become failed sessions") {
  const Scene& c = scene("cups_line");
  auto script = std::make_shared<MockScript>();
  script->add({std::nullopt, std::nullopt, {}, "I am not sure what you mean."});
  const SessionResult r = run_session(make_policy(PlannerKind::Llm, llm_options(script)), c, c.inquiries[0],
                                      UserOracle(c, "cup_1"));
  CHECK_FALSE(r.success);
  CHECK(r.queries == 0);
  CHECK_FALSE(r.failure_reason.empty());
}

TEST_CASE("session state machine") {
  const Scene& c = scene("cups_line");
  Session s(c, c.inquiries[0], make_policy(PlannerKind::Exact, {}));
  CHECK(s.state() == SessionState::Planning);
  s.start();
  CHECK(s.state() == SessionState::AwaitingAnswer);
  CHECK(s.pending_options() == std::vector<std::string>{"blue", "green"});
  s.answer("blue");
  s.answer("small");
  CHECK(s.state() == SessionState::Delivered);
  CHECK(s.result("cup_3").success);
  CHECK_FALSE(s.result("cup_1").success);
  CHECK_THROWS(s.answer("small"));

  Session aborted(c, c.inquiries[0], make_policy(PlannerKind::Exact, {}));
  aborted.start();
  aborted.abort("user left");
  CHECK(aborted.state() == SessionState::Failed);
  CHECK(aborted.result().failure_reason == "user left");

  const auto j = to_json(s.result("cup_3"));
  CHECK(j["success"] == true);
  CHECK(j["queries"] == 2);
  CHECK(j["transcript"].size() == 5);
}
