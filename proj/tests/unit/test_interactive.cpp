#include <doctest.h>

#include <sstream>

#include "disambig/interactive.hpp"
#include "disambig/policies.hpp"
#include "unit/helpers.hpp"

using namespace disambig;
using testing_support::scene;

namespace {

std::unique_ptr<PlannerPolicy> exact_policy() {
  PolicyOptions o;
  o.config.allow_inferred = true;
  return make_policy(PlannerKind::Exact, o);
}

}  // namespace

TEST_CASE("typed answers") {
  const std::vector<std::string> opts{"bottom", "middle", "top"};
  CHECK(match_typed_answer("2", opts) == std::optional<std::string>("middle"));
  CHECK(match_typed_answer("TOP", opts) == std::optional<std::string>("top"));
  CHECK(match_typed_answer(" bottom ", opts) == std::optional<std::string>("bottom"));
  CHECK(match_typed_answer("none", opts) == std::optional<std::string>(kNoneOfThose));
  CHECK(match_typed_answer("4", opts) == std::nullopt);
  CHECK(match_typed_answer("purple", opts) == std::nullopt);
  const std::vector<std::string> long_opts{"large blue cup", "small blue cup"};
  CHECK(match_typed_answer("small", long_opts) == std::optional<std::string>("small blue cup"));
  CHECK(match_typed_answer("blue", long_opts) == std::nullopt);
}

TEST_CASE("answerer: bottom, back, left") {
  const Scene& p = scene("plum_pyramid");
  std::istringstream in("bottom\nback\nleft\n");
  std::ostringstream out;
  const SessionResult r = run_answerer(p, p.inquiries[0], exact_policy(), in, out);
  CHECK(r.success);
  CHECK(r.queries == 3);
  CHECK(r.delivered == std::optional<ObjectId>("b_back_left"));
  CHECK(r.move_order_valid);
  CHECK(out.str().find("Which layer") != std::string::npos);
}

TEST_CASE("answerer re-prompts on invalid input") {
  const Scene& c = scene("cups_line");
  std::istringstream in("purple\nblue\n7\nlarge\n");
  std::ostringstream out;
  const SessionResult r = run_answerer(c, c.inquiries[0], make_policy(PlannerKind::Exact, {}), in, out);
  CHECK(r.success);
  CHECK(r.queries == 2);
  CHECK(r.delivered == std::optional<ObjectId>("cup_1"));
  std::size_t reprompts = 0;
  for (std::size_t at = 0; (at = out.str().find("Please answer with one of", at)) != std::string::npos; ++at) {
    ++reprompts;
  }
  CHECK(reprompts == 2);
}

TEST_CASE("answerer EOF fails the session") {
  const Scene& c = scene("cups_line");
  std::istringstream in("blue\n");
  std::ostringstream out;
  const SessionResult r = run_answerer(c, c.inquiries[0], make_policy(PlannerKind::Exact, {}), in, out);
  CHECK_FALSE(r.success);
  CHECK(r.queries == 2);
  CHECK_FALSE(r.failure_reason.empty());
}

TEST_CASE("questioner: pointing at the target") {
  const Scene& c = scene("cups_line");
  QuestionerGame game(c, c.inquiries[0], "cup_3");
  CHECK(game.budget() == 8);
  const auto reply = game.ask("Is it the small blue cup?");
  CHECK(reply.finished);
  CHECK(game.queries() == 1);
  const SessionResult r = game.result();
  CHECK(r.success);
  CHECK(r.delivered == std::optional<ObjectId>("cup_3"));
}

TEST_CASE("questioner: questions then a delivery") {
  const Scene& c = scene("cups_line");
  QuestionerGame game(c, c.inquiries[0], "cup_4");
  CHECK(game.ask("Is it blue?").answer == "no");
  CHECK(game.ask("Is it large?").answer == "yes");
  CHECK(game.ask("Is it the small green cup?").answer == "no");
  CHECK_FALSE(game.finished());
  CHECK_FALSE(game.deliver("cup").finished);
  CHECK(game.deliver("large green cup").finished);
  CHECK(game.result().success);
  CHECK(game.result().queries == 3);
  CHECK_THROWS(game.ask("Is it blue?"));

  QuestionerGame wrong(c, c.inquiries[0], "cup_4");
  wrong.deliver("small blue cup");
  CHECK_FALSE(wrong.result().success);
}

TEST_CASE("questioner over a stream") {
  const Scene& c = scene("cups_line");
  std::istringstream in("is it green?\nis it small?\ndeliver small green cup\n");
  std::ostringstream out;
  const SessionResult r = run_questioner(c, c.inquiries[0], "cup_2", in, out);
  CHECK(r.success);
  CHECK(r.queries == 2);
  CHECK(out.str().find("yes") != std::string::npos);
}
