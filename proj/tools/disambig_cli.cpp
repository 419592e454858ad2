#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "disambig/benchmark.hpp"
#include "disambig/corpus.hpp"
#include "disambig/interactive.hpp"
#include "disambig/plan.hpp"
#include "disambig/service.hpp"
#include "disambig/text.hpp"

using namespace disambig;

namespace {

struct Common {
  std::string data_dir = default_data_dir().string();
  std::string corpus;
  std::string mock;
  std::string mode = "whole";
  std::string prompt = "few";
  bool allow_inferred = false;

  std::filesystem::path corpus_path() const {
    return corpus.empty() ? std::filesystem::path(data_dir) / "corpus" : std::filesystem::path(corpus);
  }
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

PolicyOptions policy_options(const Common& c, bool needs_llm) {
  PolicyOptions p;
  p.config.allow_inferred = c.allow_inferred;
  p.mode = planner_mode_from_token(c.mode);
  if (!needs_llm) return p;
  if (c.prompt != "few" && c.prompt != "zero") throw ConfigError("--prompt must be few or zero");
  p.prompt = load_prompt_template(std::filesystem::path(c.data_dir) / "prompts", c.prompt == "few");
  if (!c.mock.empty()) {
    p.client_factory = mock_client_factory(std::make_shared<MockScript>(MockScript::load(c.mock)));
  } else {
    p.llm = llm_config_from_env();
    const char* key = std::getenv(p.llm.api_key_source.c_str());
    if (!key || !*key) throw ConfigError(ConfigurationError(p.llm.api_key_source).what());
    p.client_factory = http_client_factory(p.llm);
  }
  return p;
}

void add_common(CLI::App* cmd, Common& c, bool llm_flags) {
  cmd->add_option("--data-dir", c.data_dir, "Bundled data directory");
  cmd->add_option("--corpus", c.corpus, "Corpus directory, manifest or scene file");
  cmd->add_flag("--allow-inferred", c.allow_inferred, "Let the greedy planner use unmentioned features");
  if (llm_flags) {
    cmd->add_option("--mock", c.mock, "Mock chat script instead of the live endpoint");
    cmd->add_option("--mode", c.mode, "whole or incremental")->check(CLI::IsMember({"whole", "incremental"}));
    cmd->add_option("--prompt", c.prompt, "few or zero")->check(CLI::IsMember({"few", "zero"}));
  }
}

const Scene& require_scene(const SceneCorpus& corpus, const std::string& id) {
  const Scene* s = corpus.find_scene(id);
  if (!s) throw ConfigError("no scene '" + id + "' in the corpus");
  return *s;
}

const Inquiry& require_inquiry(const Scene& scene, std::size_t index) {
  if (index >= scene.inquiries.size()) {
    throw ConfigError("scene '" + scene.id + "' has " + std::to_string(scene.inquiries.size()) + " inquiries");
  }
  return scene.inquiries[index];
}

void write_text(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << content;
  if (!out) throw ConfigError("cannot write " + path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Object disambiguation planners, benchmark and service"};
  app.require_subcommand(1);
  std::string log_level = "warn";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error");

  Common common;

  auto* validate = app.add_subcommand("validate-corpus", "Load and check a scene corpus");
  add_common(validate, common, false);

  auto* bench = app.add_subcommand("bench", "Run planners against the simulated user");
  std::vector<std::string> planners{"exact"};
  int trials = 3;
  std::size_t workers = 1;
  std::string out_path, csv_path;
  bool with_sessions = false;
  add_common(bench, common, true);
  bench->add_option("--planner", planners, "exact, greedy, enum, attr, llm (repeatable or comma list)")
      ->delimiter(',');
  bench->add_option("--trials", trials, "Trials per target")->check(CLI::PositiveNumber);
  bench->add_option("--workers", workers, "Concurrent sessions")->check(CLI::PositiveNumber);
  bench->add_option("--out", out_path, "Report JSON path (default stdout)");
  bench->add_option("--csv", csv_path, "Also write the rows as CSV");
  bench->add_flag("--sessions", with_sessions, "Include every session in the report");

  auto* interactive = app.add_subcommand("interactive", "Play a session in the terminal");
  std::string scene_id, planner_token = "exact", role = "answerer";
  std::size_t inquiry_index = 0;
  std::uint32_t seed = std::random_device{}();
  add_common(interactive, common, true);
  interactive->add_option("--scene", scene_id, "Scene id")->required();
  interactive->add_option("--planner", planner_token, "Planner asking the questions");
  interactive->add_option("--inquiry", inquiry_index, "Inquiry index within the scene");
  interactive->add_option("--role", role, "answerer or questioner")
      ->check(CLI::IsMember({"answerer", "questioner"}));
  interactive->add_option("--seed", seed, "Seed for the questioner's hidden target");

  auto* serve_cmd = app.add_subcommand("serve", "Serve the HTTP API");
  int port = 8080;
  std::string host = "0.0.0.0", report_path;
  add_common(serve_cmd, common, true);
  serve_cmd->add_option("--port", port, "Port");
  serve_cmd->add_option("--host", host, "Bind address");
  serve_cmd->add_option("--report", report_path, "Report served at /api/reports/latest");

  auto* render = app.add_subcommand("render-tree", "Print a planner's tree");
  std::string format = "nested";
  add_common(render, common, false);
  render->add_option("--scene", scene_id, "Scene id")->required();
  render->add_option("--planner", planner_token, "exact, greedy, enum or attr");
  render->add_option("--inquiry", inquiry_index, "Inquiry index within the scene");
  render->add_option("--format", format, "nested or dot")->check(CLI::IsMember({"nested", "dot"}));

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    const SceneCorpus corpus = load_corpus(common.corpus_path());

    if (validate->parsed()) {
      std::size_t objects = 0;
      for (const auto& s : corpus.scenes) objects += s.objects.size();
      std::cout << corpus.scenes.size() << " scenes, " << objects << " objects: ok\n";
      return 0;
    }

    if (bench->parsed()) {
      std::vector<PlannerKind> kinds;
      for (const auto& p : planners) kinds.push_back(planner_from_token(text::trim(p)));
      const bool needs_llm = std::find(kinds.begin(), kinds.end(), PlannerKind::Llm) != kinds.end();
      const PolicyOptions options = policy_options(common, needs_llm);
      BenchmarkOptions bo;
      bo.trials = trials;
      bo.workers = workers;
      std::vector<BenchmarkReport> reports;
      for (auto kind : kinds) reports.push_back(run_benchmark(corpus, kind, options, bo));
      const BenchmarkReport report = merge_reports(reports);
      write_text(out_path, report_to_json(report, with_sessions).dump(2) + "\n");
      if (!csv_path.empty()) write_text(csv_path, report_to_csv(report));
      return 0;
    }

    if (interactive->parsed()) {
      const Scene& scene = require_scene(corpus, scene_id);
      const Inquiry& inquiry = require_inquiry(scene, inquiry_index);
      SessionResult r;
      if (role == "questioner") {
        const CandidateSet cands = candidates_for_inquiry(scene, inquiry);
        std::vector<ObjectId> ids(cands.begin(), cands.end());
        std::mt19937 gen(seed);
        const ObjectId target = ids[std::uniform_int_distribution<std::size_t>(0, ids.size() - 1)(gen)];
        r = run_questioner(scene, inquiry, target, std::cin, std::cout);
      } else {
        const PlannerKind kind = planner_from_token(planner_token);
        const PolicyOptions options = policy_options(common, kind == PlannerKind::Llm);
        r = run_answerer(scene, inquiry, make_policy(kind, options), std::cin, std::cout);
      }
      std::cerr << to_json(r).dump() << "\n";
      return 0;
    }

    if (serve_cmd->parsed()) {
      ServiceConfig config;
      config.policy = policy_options(common, false);
      if (!common.mock.empty() || std::getenv("LLM_API_KEY")) {
        try {
          config.policy = policy_options(common, true);
        } catch (const ConfigError& e) {
          spdlog::warn("llm planner unavailable: {}", e.what());
        }
      }
      if (!config.policy.client_factory) {
        // Sessions asking for the llm planner report the missing key.
        config.policy.prompt =
            load_prompt_template(std::filesystem::path(common.data_dir) / "prompts", common.prompt == "few");
        config.policy.llm = llm_config_from_env();
        config.policy.client_factory = http_client_factory(config.policy.llm);
      }
      if (!report_path.empty()) config.report_path = report_path;
      Service service(corpus, config);
      if (!serve(service, host, port)) {
        std::cerr << "error: cannot bind " << host << ":" << port << "\n";
        return 1;
      }
      return 0;
    }

    if (render->parsed()) {
      const Scene& scene = require_scene(corpus, scene_id);
      const Inquiry& inquiry = require_inquiry(scene, inquiry_index);
      const PlannerKind kind = planner_from_token(planner_token);
      if (kind == PlannerKind::Llm) throw ConfigError("render-tree needs a rule-based planner");
      PolicyOptions options = policy_options(common, false);
      TreePolicy policy(kind, options);
      policy.begin(scene, inquiry, candidates_for_inquiry(scene, inquiry));
      if (format == "dot") {
        std::cout << tree_to_dot(policy.tree());
      } else {
        std::cout << print_lenient_doc(tree_to_nested_doc(policy.tree())) << "\n";
      }
      return 0;
    }
  } catch (const CorpusError& e) {
    std::cerr << "corpus error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
