#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>

#include "json.hpp"

#include "disambig/interactive.hpp"
#include "disambig/policies.hpp"

namespace disambig {

struct ServiceConfig {
  std::chrono::seconds idle_timeout{30 * 60};
  PolicyOptions policy;
  std::optional<std::filesystem::path> report_path;
  std::string cors_origin = "*";
  std::uint32_t seed = 0;  // picks questioner-role targets
};

struct ApiResponse {
  int status = 200;
  nlohmann::ordered_json body;
};

// Request handling without the transport, so tests can drive it directly.
class Service {
 public:
  using Clock = std::chrono::steady_clock;

  Service(SceneCorpus corpus, ServiceConfig config);

  ApiResponse handle(const std::string& method, const std::string& path, const std::string& body);

  ApiResponse list_scenes() const;
  ApiResponse get_scene(const std::string& id) const;
  ApiResponse create_session(const nlohmann::json& request);
  ApiResponse answer(const std::string& session_id, const nlohmann::json& request);
  ApiResponse get_session(const std::string& session_id);
  ApiResponse latest_report() const;

  // Drops sessions idle for longer than the timeout; returns how many.
  std::size_t expire_idle(Clock::time_point now = Clock::now());
  std::size_t session_count() const;
  // Chat completions made on behalf of all sessions so far.
  std::size_t llm_calls() const { return llm_calls_; }

  const ServiceConfig& config() const { return config_; }

 private:
  struct Entry;

  std::shared_ptr<Entry> find(const std::string& id);
  nlohmann::ordered_json view(const std::string& id, Entry& entry) const;

  SceneCorpus corpus_;
  ServiceConfig config_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::mt19937_64 rng_;
  std::atomic<std::size_t> llm_calls_{0};
};

ApiResponse api_error(int status, const std::string& code, const std::string& message,
                      const nlohmann::ordered_json& detail = nullptr);

// Blocks serving HTTP on host:port. Returns false when binding fails.
bool serve(Service& service, const std::string& host, int port);

}  // namespace disambig
