#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "disambig/corpus.hpp"
#include "disambig/policies.hpp"

namespace disambig {

inline constexpr int kReportSchemaVersion = 1;

struct BenchmarkOptions {
  int trials = 3;
  std::size_t workers = 1;
  SessionOptions session;
};

struct SessionRecord {
  std::string scene_id;
  std::size_t inquiry_index = 0;
  ObjectId target;
  int trial = 0;
  SessionResult result;
  std::size_t completions = 0;
};

struct SceneRow {
  std::string scene_id;
  std::string planner;
  int sessions = 0;
  double avg_queries = 0.0;
  // Enumeration only: mean of (k+1)/2 over the scene's inquiries, weighted by
  // candidate count.
  std::optional<double> avg_queries_formula;
  double success_rate = 0.0;
  int ambiguous_failures = 0;
  std::size_t completions = 0;
};

struct Aggregate {
  double pooled_avg_queries = 0.0;
  double pooled_success_rate = 0.0;
  double macro_avg_queries = 0.0;
  double macro_success_rate = 0.0;
  int sessions = 0;
};

struct BenchmarkReport {
  std::vector<std::string> planners;
  std::vector<SceneRow> rows;  // sorted by (scene_id, planner)
  std::map<std::string, Aggregate> aggregates;
  std::vector<SessionRecord> sessions;

  const SceneRow* row(const std::string& scene_id, const std::string& planner) const;
};

// Average query count used for comparisons: the formula value for
// enumeration, the measured mean otherwise.
double comparison_avg(const SceneRow& row);

// (baseline - model) / baseline * 100. Throws std::invalid_argument when
// baseline_avg <= 0.
double improvement(double baseline_avg, double model_avg);

BenchmarkReport run_benchmark(const SceneCorpus& corpus, PlannerKind planner,
                              const PolicyOptions& policy, const BenchmarkOptions& options = {});

// Rows and aggregates of several single-planner reports.
BenchmarkReport merge_reports(const std::vector<BenchmarkReport>& reports);

// improvement[model][baseline], pooled over the corpus.
std::map<std::string, std::map<std::string, double>> improvement_matrix(const BenchmarkReport& report);

nlohmann::ordered_json report_to_json(const BenchmarkReport& report, bool include_sessions = false);
std::string report_to_csv(const BenchmarkReport& report);

}  // namespace disambig
