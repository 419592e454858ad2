#include "disambig/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace disambig {

const SceneRow* BenchmarkReport::row(const std::string& scene_id, const std::string& planner) const {
  for (const auto& r : rows) {
    if (r.scene_id == scene_id && r.planner == planner) return &r;
  }
  return nullptr;
}

double comparison_avg(const SceneRow& row) {
  return row.avg_queries_formula ? *row.avg_queries_formula : row.avg_queries;
}

double improvement(double baseline_avg, double model_avg) {
  if (!(baseline_avg > 0.0)) throw std::invalid_argument("baseline average must be positive");
  return (baseline_avg - model_avg) / baseline_avg * 100.0;
}

namespace {

struct Job {
  const Scene* scene;
  std::size_t inquiry;
  ObjectId target;
  int trial;
};

Aggregate aggregate(const std::vector<const SceneRow*>& rows) {
  Aggregate a;
  double weighted_q = 0, weighted_s = 0, sum_q = 0, sum_s = 0;
  for (const auto* r : rows) {
    weighted_q += comparison_avg(*r) * r->sessions;
    weighted_s += r->success_rate * r->sessions;
    sum_q += comparison_avg(*r);
    sum_s += r->success_rate;
    a.sessions += r->sessions;
  }
  if (a.sessions > 0) {
    a.pooled_avg_queries = weighted_q / a.sessions;
    a.pooled_success_rate = weighted_s / a.sessions;
  }
  if (!rows.empty()) {
    a.macro_avg_queries = sum_q / static_cast<double>(rows.size());
    a.macro_success_rate = sum_s / static_cast<double>(rows.size());
  }
  return a;
}

void finish(BenchmarkReport& report) {
  std::sort(report.rows.begin(), report.rows.end(), [](const SceneRow& a, const SceneRow& b) {
    return std::tie(a.scene_id, a.planner) < std::tie(b.scene_id, b.planner);
  });
  report.aggregates.clear();
  for (const auto& p : report.planners) {
    std::vector<const SceneRow*> rows;
    for (const auto& r : report.rows) {
      if (r.planner == p) rows.push_back(&r);
    }
    report.aggregates[p] = aggregate(rows);
  }
}

}  // namespace

BenchmarkReport run_benchmark(const SceneCorpus& corpus, PlannerKind planner,
                              const PolicyOptions& policy, const BenchmarkOptions& options) {
  const int trials = std::max(1, options.trials);
  const bool deterministic = make_policy(planner, policy)->deterministic();
  const int distinct_trials = deterministic ? 1 : trials;

  std::vector<Job> jobs;
  for (const auto& scene : corpus.scenes) {
    for (std::size_t q = 0; q < scene.inquiries.size(); ++q) {
      for (const auto& target : candidates_for_inquiry(scene, scene.inquiries[q])) {
        for (int t = 0; t < distinct_trials; ++t) jobs.push_back({&scene, q, target, t});
      }
    }
  }

  std::vector<SessionRecord> results(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const Job& job = jobs[i];
      try {
        auto p = make_policy(planner, policy);
        Session s(*job.scene, job.scene->inquiries[job.inquiry], std::move(p), options.session);
        const UserOracle oracle(*job.scene, job.target);
        s.start();
        while (s.state() == SessionState::AwaitingAnswer) s.answer(oracle_answer(oracle, *s.pending()));
        results[i] = {job.scene->id, job.inquiry, job.target, job.trial, s.result(job.target),
                      s.policy().completions()};
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = jobs.size();
      }
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(options.workers, jobs.size()));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);

  // Deterministic planners repeat trial 0.
  if (distinct_trials < trials) {
    std::vector<SessionRecord> expanded;
    for (const auto& r : results) {
      for (int t = 0; t < trials; ++t) {
        expanded.push_back(r);
        expanded.back().trial = t;
      }
    }
    results = std::move(expanded);
  }

  BenchmarkReport report;
  const std::string name = to_token(planner);
  report.planners = {name};
  for (const auto& scene : corpus.scenes) {
    SceneRow row;
    row.scene_id = scene.id;
    row.planner = name;
    double queries = 0, successes = 0;
    for (const auto& r : results) {
      if (r.scene_id != scene.id) continue;
      ++row.sessions;
      queries += r.result.queries;
      if (r.result.success) ++successes;
      if (r.result.ambiguous) ++row.ambiguous_failures;
      row.completions += r.completions;
    }
    if (row.sessions > 0) {
      row.avg_queries = queries / row.sessions;
      row.success_rate = successes / row.sessions;
    }
    if (planner == PlannerKind::Enumeration) {
      double num = 0, den = 0;
      for (const auto& inquiry : scene.inquiries) {
        const auto k = static_cast<std::int64_t>(candidates_for_inquiry(scene, inquiry).size());
        const Rational f = expected_enum_queries(k);
        num += static_cast<double>(k) * static_cast<double>(f.numerator()) / static_cast<double>(f.denominator());
        den += static_cast<double>(k);
      }
      if (den > 0) row.avg_queries_formula = num / den;
    }
    report.rows.push_back(row);
  }
  report.sessions = std::move(results);
  finish(report);
  return report;
}

BenchmarkReport merge_reports(const std::vector<BenchmarkReport>& reports) {
  BenchmarkReport out;
  for (const auto& r : reports) {
    for (const auto& p : r.planners) {
      if (std::find(out.planners.begin(), out.planners.end(), p) == out.planners.end()) {
        out.planners.push_back(p);
      }
    }
    out.rows.insert(out.rows.end(), r.rows.begin(), r.rows.end());
    out.sessions.insert(out.sessions.end(), r.sessions.begin(), r.sessions.end());
  }
  finish(out);
  return out;
}

std::map<std::string, std::map<std::string, double>> improvement_matrix(const BenchmarkReport& report) {
  std::map<std::string, std::map<std::string, double>> m;
  for (const auto& model : report.planners) {
    for (const auto& baseline : report.planners) {
      if (model == baseline) continue;
      const double b = report.aggregates.at(baseline).pooled_avg_queries;
      if (b > 0) m[model][baseline] = improvement(b, report.aggregates.at(model).pooled_avg_queries);
    }
  }
  return m;
}

nlohmann::ordered_json report_to_json(const BenchmarkReport& report, bool include_sessions) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["planners"] = report.planners;
  j["rows"] = ordered_json::array();
  for (const auto& r : report.rows) {
    ordered_json row;
    row["scene_id"] = r.scene_id;
    row["planner"] = r.planner;
    row["sessions"] = r.sessions;
    row["avg_queries"] = r.avg_queries;
    row["avg_queries_formula"] = r.avg_queries_formula ? ordered_json(*r.avg_queries_formula) : ordered_json();
    row["success_rate"] = r.success_rate;
    row["ambiguous_failures"] = r.ambiguous_failures;
    row["completions"] = r.completions;
    j["rows"].push_back(row);
  }
  j["aggregates"] = ordered_json::object();
  for (const auto& [p, a] : report.aggregates) {
    j["aggregates"][p] = {{"sessions", a.sessions},
                          {"pooled_avg_queries", a.pooled_avg_queries},
                          {"pooled_success_rate", a.pooled_success_rate},
                          {"macro_avg_queries", a.macro_avg_queries},
                          {"macro_success_rate", a.macro_success_rate}};
  }
  j["improvement"] = ordered_json::object();
  for (const auto& [model, row] : improvement_matrix(report)) {
    for (const auto& [baseline, v] : row) j["improvement"][model][baseline] = v;
  }
  // Per-scene improvement, comparing each pair of planners on that scene.
  j["improvement_by_scene"] = ordered_json::object();
  for (const auto& r : report.rows) {
    for (const auto& b : report.rows) {
      if (b.scene_id != r.scene_id || b.planner == r.planner) continue;
      const double base = comparison_avg(b);
      if (base > 0) j["improvement_by_scene"][r.scene_id][r.planner][b.planner] = improvement(base, comparison_avg(r));
    }
  }
  if (include_sessions) {
    j["sessions"] = ordered_json::array();
    for (const auto& s : report.sessions) {
      ordered_json e;
      e["scene_id"] = s.scene_id;
      e["inquiry_index"] = s.inquiry_index;
      e["target"] = s.target;
      e["trial"] = s.trial;
      e["result"] = to_json(s.result);
      j["sessions"].push_back(e);
    }
  }
  return j;
}

std::string report_to_csv(const BenchmarkReport& report) {
  std::ostringstream out;
  out << "scene_id,planner,sessions,avg_queries,avg_queries_formula,success_rate,ambiguous_failures\n";
  for (const auto& r : report.rows) {
    out << r.scene_id << ',' << r.planner << ',' << r.sessions << ','
        << nlohmann::json(r.avg_queries).dump() << ','
        << (r.avg_queries_formula ? nlohmann::json(*r.avg_queries_formula).dump() : "") << ','
        << nlohmann::json(r.success_rate).dump() << ',' << r.ambiguous_failures << '\n';
  }
  return out.str();
}

}  // namespace disambig
