#include "disambig/llm_client.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "json.hpp"

namespace disambig {

using nlohmann::json;

LLMConfig llm_config_from_env() {
  LLMConfig c;
  if (const char* base = std::getenv("LLM_API_BASE"); base && *base) c.base_url = base;
  if (const char* model = std::getenv("LLM_MODEL"); model && *model) c.model_name = model;
  return c;
}

RequestGate::RequestGate(std::size_t max_in_flight, double requests_per_second)
    : max_in_flight_(max_in_flight == 0 ? 1 : max_in_flight),
      rate_(requests_per_second),
      tokens_(requests_per_second > 0 ? std::max(1.0, requests_per_second) : 0.0),
      last_(std::chrono::steady_clock::now()) {}

std::unique_ptr<RequestGate::Ticket> RequestGate::acquire() {
  std::unique_lock lock(mutex_);
  cv_.wait(lock, [&] { return in_flight_ < max_in_flight_; });
  ++in_flight_;
  if (rate_ > 0) {
    const double burst = std::max(1.0, rate_);
    for (;;) {
      const auto now = std::chrono::steady_clock::now();
      const double elapsed = std::chrono::duration<double>(now - last_).count();
      last_ = now;
      tokens_ = std::min(burst, tokens_ + elapsed * rate_);
      if (tokens_ >= 1.0) break;
      const auto wait = std::chrono::duration<double>((1.0 - tokens_) / rate_);
      lock.unlock();
      std::this_thread::sleep_for(wait);
      lock.lock();
    }
    tokens_ -= 1.0;
  }
  return std::make_unique<Ticket>(*this);
}

void RequestGate::release() {
  {
    std::lock_guard lock(mutex_);
    --in_flight_;
  }
  cv_.notify_one();
}

namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Endpoint split_url(const std::string& base) {
  const std::size_t scheme = base.find("://");
  const std::size_t host_start = scheme == std::string::npos ? 0 : scheme + 3;
  const std::size_t slash = base.find('/', host_start);
  Endpoint e;
  e.origin = slash == std::string::npos ? base : base.substr(0, slash);
  std::string prefix = slash == std::string::npos ? "" : base.substr(slash);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  e.path = prefix.ends_with("/chat/completions") ? prefix : prefix + "/chat/completions";
  return e;
}

}  // namespace

HttpChatClient::HttpChatClient(LLMConfig config, std::shared_ptr<RequestGate> gate)
    : config_(std::move(config)), gate_(std::move(gate)) {
  if (config_.max_retries < 0) throw std::invalid_argument("max_retries must be >= 0");
  if (config_.temperature < 0) throw std::invalid_argument("temperature must be >= 0");
  if (!gate_) gate_ = std::make_shared<RequestGate>(config_.max_in_flight, config_.requests_per_second);
}

std::string HttpChatClient::complete(const std::vector<ChatMessage>& messages) {
  const char* key = std::getenv(config_.api_key_source.c_str());
  if (!key || !*key) throw ConfigurationError(config_.api_key_source);

  json body;
  body["model"] = config_.model_name;
  body["temperature"] = config_.temperature;
  body["messages"] = json::array();
  for (const auto& m : messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});
  const std::string payload = body.dump();

  for (int attempt_no = 0;; ++attempt_no) {
    try {
      return attempt(key, payload);
    } catch (const TimeoutError& e) {
      if (attempt_no >= config_.max_retries) throw;
      spdlog::warn("completion timed out, retrying ({}/{})", attempt_no + 1, config_.max_retries);
    } catch (const NetworkError& e) {
      if (attempt_no >= config_.max_retries) throw;
      spdlog::warn("completion failed: {}, retrying ({}/{})", e.what(), attempt_no + 1,
                   config_.max_retries);
    }
  }
}

std::string HttpChatClient::attempt(const std::string& key, const std::string& body) {
  const Endpoint ep = split_url(config_.base_url);
  httplib::Client client(ep.origin);
  const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
  const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - seconds);
  client.set_connection_timeout(seconds.count(), micros.count());
  client.set_read_timeout(seconds.count(), micros.count());
  client.set_write_timeout(seconds.count(), micros.count());
  httplib::Headers headers{{"Authorization", "Bearer " + key}};

  auto ticket = gate_->acquire();
  ++calls_;
  auto res = client.Post(ep.path, headers, body, "application/json");
  if (!res) {
    const auto err = res.error();
    if (err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout) {
      throw TimeoutError("completion request timed out: " + httplib::to_string(err));
    }
    throw NetworkError("completion request failed: " + httplib::to_string(err));
  }
  if (res->status == 401) throw AuthenticationError(config_.api_key_source);
  if (res->status < 200 || res->status >= 300) throw HttpStatusError(res->status, res->body);

  json doc;
  try {
    doc = json::parse(res->body);
  } catch (const json::exception& e) {
    throw LlmError(std::string("malformed completion body: ") + e.what());
  }
  if (doc.contains("usage") && doc["usage"].is_object()) {
    const auto& u = doc["usage"];
    spdlog::info("token usage: prompt={} completion={} total={}", u.value("prompt_tokens", 0),
                 u.value("completion_tokens", 0), u.value("total_tokens", 0));
  }
  try {
    return doc.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception&) {
    throw LlmError("completion body has no choices[0].message.content");
  }
}

std::string complete(const LLMConfig& config, const std::vector<ChatMessage>& messages) {
  HttpChatClient client(config);
  return client.complete(messages);
}

std::string hash_messages(const std::vector<ChatMessage>& messages) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    h ^= 0xff;
    h *= 1099511628211ULL;
  };
  for (const auto& m : messages) {
    mix(m.role);
    mix(m.content);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

MockScript MockScript::from_json_text(const std::string& json_text) {
  const json doc = json::parse(json_text);
  const json& list = doc.is_object() ? doc.at("entries") : doc;
  if (!list.is_array()) throw std::runtime_error("mock script must be a list of entries");
  MockScript script;
  for (const auto& item : list) {
    Entry e;
    e.response = item.at("response").get<std::string>();
    if (item.contains("hash")) e.hash = item["hash"].get<std::string>();
    if (item.contains("index")) e.index = item["index"].get<std::size_t>();
    if (item.contains("contains")) e.contains = item["contains"].get<std::vector<std::string>>();
    const bool is_default = item.value("default", false);
    if (!is_default && !e.hash && !e.index && e.contains.empty()) {
      throw std::runtime_error("mock entry without selector (use \"default\": true)");
    }
    script.add(std::move(e));
  }
  return script;
}

MockScript MockScript::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read mock script " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::optional<std::string> MockScript::lookup(const std::vector<ChatMessage>& messages,
                                              std::size_t call_index) const {
  std::string last_user;
  for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
    if (it->role == "user") {
      last_user = it->content;
      break;
    }
  }
  std::optional<std::string> hash;
  for (const auto& e : entries_) {
    if (e.hash) {
      if (!hash) hash = hash_messages(messages);
      if (*e.hash != *hash) continue;
    }
    if (e.index && *e.index != call_index) continue;
    bool all = true;
    for (const auto& s : e.contains) {
      if (last_user.find(s) == std::string::npos) {
        all = false;
        break;
      }
    }
    if (all) return e.response;
  }
  return std::nullopt;
}

MockChatClient::MockChatClient(std::shared_ptr<const MockScript> script) : script_(std::move(script)) {}

std::string MockChatClient::complete(const std::vector<ChatMessage>& messages) {
  const std::size_t index = log_.size();
  log_.push_back(messages);
  auto response = script_->lookup(messages, index);
  if (!response) {
    throw LlmError("mock script has no response for call " + std::to_string(index) + " (hash " +
                   hash_messages(messages) + ")");
  }
  return *response;
}

ChatClientFactory mock_client_factory(std::shared_ptr<const MockScript> script) {
  return [script] { return std::make_unique<MockChatClient>(script); };
}

ChatClientFactory http_client_factory(const LLMConfig& config) {
  auto gate = std::make_shared<RequestGate>(config.max_in_flight, config.requests_per_second);
  return [config, gate] { return std::make_unique<HttpChatClient>(config, gate); };
}

}  // namespace disambig
