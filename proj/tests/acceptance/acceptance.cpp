// One PASS/FAIL line per acceptance criterion; exit status 1 if any fail.
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "disambig/action.hpp"
#include "disambig/benchmark.hpp"
#include "disambig/corpus.hpp"
#include "disambig/lenient_doc.hpp"
#include "disambig/llm_planner.hpp"
#include "disambig/oracle.hpp"
#include "disambig/planners.hpp"
#include "disambig/policies.hpp"
#include "disambig/session.hpp"
#include "disambig/text.hpp"

using namespace disambig;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

const SceneCorpus& corpus() {
  static const SceneCorpus c = load_corpus(DISAMBIG_DATA_DIR "/corpus");
  return c;
}

const Scene& scene(const std::string& id) { return *corpus().find_scene(id); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PlannerConfig inferred() {
  PlannerConfig c;
  c.allow_inferred = true;
  return c;
}

PolicyOptions mock_llm() {
  PolicyOptions o;
  o.prompt = load_prompt_template(DISAMBIG_DATA_DIR "/prompts", true);
  o.client_factory =
      mock_client_factory(std::make_shared<MockScript>(MockScript::load(DISAMBIG_DATA_DIR "/mock/fewshot_mock.json")));
  return o;
}

// Un-memoized recursion over every single-feature split. Returns total leaf
// depth, or nullopt when some subset cannot be separated.
std::optional<std::int64_t> brute_total_depth(const Scene& s, const std::vector<ObjectId>& set) {
  if (set.size() == 1) return 0;
  std::optional<std::int64_t> best;
  for (const auto& f : s.features) {
    std::map<std::string, std::vector<ObjectId>> groups;
    bool usable = true;
    for (const auto& id : set) {
      const std::string* v = s.object(id).value_of(f.name);
      if (!v) {
        usable = false;
        break;
      }
      groups[*v].push_back(id);
    }
    if (!usable || groups.size() < 2) continue;
    std::optional<std::int64_t> total = static_cast<std::int64_t>(set.size());
    for (const auto& [_, g] : groups) {
      const auto sub = brute_total_depth(s, g);
      if (!sub) {
        total.reset();
        break;
      }
      *total += *sub;
    }
    if (total && (!best || *total < *best)) best = total;
  }
  return best;
}

Outcome enumeration_formula() {
  Outcome o;
  for (std::int64_t k = 1; k <= 20; ++k) {
    o.require(expected_enum_queries(k) == Rational(k + 1, 2), "formula wrong at k=" + std::to_string(k));
  }
  BenchmarkOptions b;
  b.trials = 1;
  const BenchmarkReport r = run_benchmark(corpus(), PlannerKind::Enumeration, {}, b);
  const SceneRow* row = r.row("plum_pyramid", "enum");
  o.require(row && row->sessions == 14, "pyramid row missing or not 14 sessions");
  o.require(row && row->avg_queries_formula && *row->avg_queries_formula == 7.5, "pyramid enum average is not 7.5");
  return o;
}

Outcome cups_two_questions() {
  Outcome o;
  const Scene& c = scene("cups_line");
  const CandidateSet cands = candidates_for_inquiry(c, c.inquiries[0]);
  o.require(build_tree_exact(c, cands, CostModel::Expected, {}).cost == Rational(2), "exact cost != 2");
  o.require(tree_cost(build_tree_greedy(c, cands, {}), CostModel::Expected) == Rational(2), "greedy cost != 2");
  for (auto kind : {PlannerKind::Exact, PlannerKind::Greedy}) {
    for (const auto& id : cands) {
      const SessionResult r = run_session(make_policy(kind, {}), c, c.inquiries[0], UserOracle(c, id));
      o.require(r.success && r.queries == 2, to_token(kind) + " session for " + id + " did not take 2 queries");
    }
  }
  return o;
}

Outcome pyramid_structure() {
  Outcome o;
  auto ask = [](std::string text, std::vector<std::pair<std::string, TreeNode>> kids) {
    std::vector<Branch> branches;
    for (auto& [label, node] : kids) branches.push_back({label, std::move(node)});
    return TreeNode::question(std::move(text), std::move(branches));
  };
  std::vector<std::pair<std::string, TreeNode>> rows, corners;
  for (std::string r : {"front", "middle", "back"}) {
    std::vector<std::pair<std::string, TreeNode>> sides;
    for (std::string s : {"left", "middle", "right"}) sides.push_back({s, TreeNode::leaf("b_" + r + "_" + s)});
    rows.push_back({r, ask("Which plum in that row?", std::move(sides))});
  }
  for (std::string c : {"front_left", "front_right", "back_left", "back_right"}) {
    corners.push_back({c, TreeNode::leaf("m_" + c)});
  }
  const DecisionTree layout{ask("Which layer?", {{"bottom", ask("Which row?", std::move(rows))},
                                                 {"middle", ask("Which corner?", std::move(corners))},
                                                 {"top", TreeNode::leaf("top")}})};
  o.require(expected_query_count(layout) == Rational(36, 14), "layout expected count != 36/14");
  o.require(worst_case_depth(layout) == 3, "layout depth != 3");

  const Scene& p = scene("plum_pyramid");
  const CandidateSet cands = candidates_for_inquiry(p, p.inquiries[0]);
  const ExactResult exact = build_tree_exact(p, cands, CostModel::Expected, inferred());
  const auto brute = brute_total_depth(p, {cands.begin(), cands.end()});
  o.require(exact.cost <= Rational(36, 14), "exact cost above 36/14");
  o.require(brute && exact.cost == Rational(*brute, 14), "exact disagrees with plain recursion");
  o.require(expected_query_count(exact.tree) == exact.cost, "tree metric disagrees with search cost");
  return o;
}

Outcome golden_transcript() {
  Outcome o;
  const Scene& b = scene("breakfast_table");
  const auto target = resolve_object_strict(b, "left chocolate bar");
  o.require(target.has_value(), "cannot resolve the left chocolate bar");
  if (!target) return o;
  std::string first;
  for (int run = 0; run < 2; ++run) {
    const SessionResult r = run_session(make_policy(PlannerKind::Llm, mock_llm()), b, b.inquiries[0],
                                        UserOracle(b, *target));
    std::vector<EventKind> actions;
    for (const auto& e : r.transcript) {
      if (e.kind != EventKind::Answer && e.kind != EventKind::Warning) actions.push_back(e.kind);
    }
    o.require(actions == std::vector<EventKind>{EventKind::Ask, EventKind::Ask, EventKind::Deliver},
              "action sequence is not ask, ask, deliver");
    o.require(r.queries == 2 && r.success, "not a 2-query success");
    const std::string text = format_transcript(r.transcript);
    if (run == 0) {
      first = text;
    } else {
      o.require(text == first, "transcript differs between runs");
    }
  }
  o.require(first == read_file(DISAMBIG_FIXTURE_DIR "/golden_breakfast_transcript.txt"),
            "transcript differs from the golden file");
  return o;
}

Outcome inferred_feature_path() {
  Outcome o;
  const Scene& p = scene("plum_pyramid");
  const auto tmpl = load_prompt_template(DISAMBIG_DATA_DIR "/prompts", true);
  const std::string turn = text::normalize(render_prompt(tmpl, p.description, p.inquiries[0].text).back().content);
  for (const char* word : {"row", "rows", "column", "columns", "side", "left", "right", "front", "back", "corner"}) {
    o.require(!text::contains_phrase(turn, word), std::string("prompt mentions '") + word + "'");
  }
  const auto target = resolve_object_strict(p, "left plum of the back row of the bottom layer");
  o.require(target.has_value(), "target phrase does not resolve");
  if (!target) return o;
  const SessionResult r =
      run_session(make_policy(PlannerKind::Llm, mock_llm()), p, p.inquiries[0], UserOracle(p, *target));
  o.require(r.success && r.delivered == target, "session did not deliver the target");
  o.require(r.queries == 3, "took " + std::to_string(r.queries) + " queries, expected 3");
  o.require(r.move_order_valid, "move-away order violated");
  return o;
}

Outcome attr_incompleteness() {
  Outcome o;
  BenchmarkOptions b;
  b.trials = 1;
  PolicyOptions exact_opts;
  exact_opts.config = inferred();
  const BenchmarkReport attr = run_benchmark(corpus(), PlannerKind::AttrLimited, {}, b);
  const BenchmarkReport exact = run_benchmark(corpus(), PlannerKind::Exact, exact_opts, b);
  int stacked = 0;
  for (const auto& s : corpus().scenes) {
    const SceneRow* a = attr.row(s.id, "attr");
    const SceneRow* e = exact.row(s.id, "exact");
    if (!a || !e) {
      o.require(false, "missing row for " + s.id);
      continue;
    }
    if (s.has_supports()) {
      ++stacked;
      o.require(a->success_rate < 1.0, "attr complete on stacked scene " + s.id);
      o.require(e->success_rate == 1.0, "exact incomplete on " + s.id);
    } else {
      for (const auto& q : s.inquiries) {
        const CandidateSet c = candidates_for_inquiry(s, q);
        const ValidationReport v = validate_tree(build_tree_attr_limited(s, c), c);
        o.require(v.coverage() == Rational(1), "attr coverage below 1 on flat scene " + s.id);
      }
      o.require(a->success_rate == 1.0, "attr sessions fail on flat scene " + s.id);
    }
  }
  o.require(stacked > 0, "no stacked scenes");
  return o;
}

Outcome optimality_oracle() {
  Outcome o;
  int checked = 0;
  for (const auto& s : corpus().scenes) {
    for (const auto& q : s.inquiries) {
      const CandidateSet c = candidates_for_inquiry(s, q);
      const auto n = static_cast<std::int64_t>(c.size());
      const ExactResult exact = build_tree_exact(s, c, CostModel::Expected, inferred());
      if (c.size() <= 8) {
        const auto brute = brute_total_depth(s, {c.begin(), c.end()});
        o.require(brute && exact.cost == Rational(*brute, n), "exact != brute force on " + s.id);
        ++checked;
      }
      const DecisionTree greedy = build_tree_greedy(s, c, inferred());
      o.require(validate_tree(greedy, c).valid(), "greedy tree incomplete on " + s.id);
      const Rational g = tree_cost(greedy, CostModel::Expected);
      o.require(exact.cost <= g, "exact above greedy on " + s.id);
      o.require(g <= expected_enum_queries(n), "greedy above enumeration on " + s.id);
    }
  }
  o.require(checked > 0, "no small scenes");
  return o;
}

Action random_action(std::mt19937& gen) {
  static const std::vector<std::string> words{"left", "plum", "of", "the", "back", "row", "Chocolate",
                                              "bar,", "(big)", "x:y", "\"quoted\"", "<top>"};
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
  std::uniform_int_distribution<int> len(1, 6), verb(0, 2);
  std::string phrase;
  for (int i = len(gen); i > 0; --i) phrase += (phrase.empty() ? "" : " ") + words[pick(gen)];
  switch (verb(gen)) {
    case 0: return Ask{phrase + "?", {}, std::nullopt, std::nullopt};
    case 1: return MoveAway{phrase};
    default: return Deliver{phrase};
  }
}

Outcome parser_round_trips() {
  Outcome o;
  for (const char* name : {"zero_shot_output_shape.txt", "few_shot_response.txt"}) {
    const std::string text = read_file(std::string(DISAMBIG_FIXTURE_DIR) + "/" + name);
    try {
      const ExtractedDocuments docs = extract_documents(text);
      for (const LenientDoc* doc : {&docs.planner, &docs.tree}) {
        const std::string printed = print_lenient_doc(*doc);
        o.require(parse_lenient_doc(printed) == *doc, std::string(name) + " does not reparse equal");
      }
      const DecisionTree tree = normalize_nested_tree(docs.tree);
      o.require(normalize_nested_tree(parse_lenient_doc(print_lenient_doc(tree_to_nested_doc(tree)))) == tree,
                std::string(name) + " tree does not round trip");
    } catch (const std::exception& e) {
      o.require(false, std::string(name) + ": " + e.what());
    }
  }
  const PlanResult plan = plan_from_response(read_file(DISAMBIG_FIXTURE_DIR "/few_shot_response.txt"));
  o.require(plan_from_doc(parse_lenient_doc(print_lenient_doc(plan_to_doc(plan.plan)))) == plan.plan,
            "few-shot plan does not round trip");

  std::mt19937 gen(1000);
  int bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const Action a = random_action(gen);
    try {
      if (!(parse_action(print_action(a)) == a)) ++bad;
    } catch (const std::exception&) {
      ++bad;
    }
  }
  o.require(bad == 0, std::to_string(bad) + " of 1000 actions did not round trip");
  return o;
}

Outcome improvement_signs() {
  Outcome o;
  std::mt19937 gen(5);
  std::uniform_real_distribution<double> avg(0.5, 10.0);
  for (int i = 0; i < 500; ++i) {
    const double base = avg(gen), model = avg(gen);
    const double v = improvement(base, model);
    o.require((model < base) == (v > 0) && (model > base) == (v < 0), "sign mismatch");
  }

  // Table-style comparison of the scripted model on the inquiries it covers.
  BenchmarkOptions b;
  b.trials = 1;
  PolicyOptions exact_opts;
  exact_opts.config = inferred();
  const BenchmarkReport llm = run_benchmark(corpus(), PlannerKind::Llm, mock_llm(), b);
  const BenchmarkReport exact = run_benchmark(corpus(), PlannerKind::Exact, exact_opts, b);
  const std::set<std::string> scripted{"breakfast_table", "plum_pyramid", "cups_line"};
  auto mean = [&](const BenchmarkReport& r, bool require_success) {
    double sum = 0;
    int n = 0;
    for (const auto& rec : r.sessions) {
      if (!scripted.count(rec.scene_id) || rec.inquiry_index != 0) continue;
      if (require_success) o.require(rec.result.success, "scripted model fails on " + rec.scene_id + "/" + rec.target);
      sum += rec.result.queries;
      ++n;
    }
    return n ? sum / n : 0.0;
  };
  double en = 0;
  int n = 0;
  for (const auto& id : scripted) {
    const Scene& s = scene(id);
    const auto k = static_cast<std::int64_t>(candidates_for_inquiry(s, s.inquiries[0]).size());
    en += boost::rational_cast<double>(expected_enum_queries(k)) * static_cast<double>(k);
    n += static_cast<int>(k);
  }
  en /= n;
  const double model = mean(llm, true);
  const double optimal = mean(exact, false);
  o.require(improvement(en, model) > 0, "model does not beat enumeration");
  o.require(improvement(optimal, model) <= 0, "model beats the optimal split");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"enumeration formula and 14-candidate average", enumeration_formula},
      {"four cups need exactly two questions", cups_two_questions},
      {"pyramid layout cost and exact optimum", pyramid_structure},
      {"golden few-shot transcript", golden_transcript},
      {"inferred-feature path on the pyramid", inferred_feature_path},
      {"attribute-limited planner incompleteness", attr_incompleteness},
      {"optimality oracle and planner ordering", optimality_oracle},
      {"parser round trips", parser_round_trips},
      {"improvement signs", improvement_signs},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = check();
    } catch (const std::exception& e) {
      out.require(false, std::string("exception: ") + e.what());
    }
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    std::printf("%s  %s (%lld ms)%s%s\n", out.pass ? "PASS" : "FAIL", name.c_str(),
                static_cast<long long>(ms.count()), out.pass ? "" : ": ", out.detail.c_str());
    if (!out.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
