#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "disambig/prompt.hpp"

namespace disambig {

struct LLMConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string model_name = "gpt-4";
  std::string api_key_source = "LLM_API_KEY";
  double temperature = 0.0;
  int max_retries = 2;
  std::chrono::milliseconds timeout{60000};
  std::size_t max_in_flight = 4;
  double requests_per_second = 0.0;  // 0 disables rate limiting
};

// Defaults overridden by LLM_API_BASE and LLM_MODEL.
LLMConfig llm_config_from_env();

class LlmError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The API key variable is unset or empty.
class ConfigurationError : public LlmError {
 public:
  explicit ConfigurationError(const std::string& variable)
      : LlmError("environment variable " + variable + " is not set"), variable_(variable) {}
  const std::string& variable() const noexcept { return variable_; }

 private:
  std::string variable_;
};

class AuthenticationError : public LlmError {
 public:
  explicit AuthenticationError(const std::string& variable)
      : LlmError("endpoint rejected the key in " + variable + " (HTTP 401)"), variable_(variable) {}
  const std::string& variable() const noexcept { return variable_; }

 private:
  std::string variable_;
};

class HttpStatusError : public LlmError {
 public:
  HttpStatusError(int status, std::string body)
      : LlmError("HTTP " + std::to_string(status) + ": " + body), status_(status),
        body_(std::move(body)) {}
  int status() const noexcept { return status_; }
  const std::string& body() const noexcept { return body_; }

 private:
  int status_;
  std::string body_;
};

class TimeoutError : public LlmError {
 public:
  using LlmError::LlmError;
};

class NetworkError : public LlmError {
 public:
  using LlmError::LlmError;
};

class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual std::string complete(const std::vector<ChatMessage>& messages) = 0;
  virtual std::size_t call_count() const = 0;
};

// Token bucket plus a cap on concurrent requests. Shared between clients.
class RequestGate {
 public:
  RequestGate(std::size_t max_in_flight, double requests_per_second);

  class Ticket {
   public:
    explicit Ticket(RequestGate& gate) : gate_(gate) {}
    ~Ticket() { gate_.release(); }
    Ticket(const Ticket&) = delete;
    Ticket& operator=(const Ticket&) = delete;

   private:
    RequestGate& gate_;
  };

  // Blocks until a slot and a token are available.
  std::unique_ptr<Ticket> acquire();

 private:
  void release();

  std::mutex mutex_;
  std::condition_variable cv_;
  std::size_t max_in_flight_;
  std::size_t in_flight_ = 0;
  double rate_;
  double tokens_;
  std::chrono::steady_clock::time_point last_;
};

// POST {base_url}/chat/completions with {model, messages, temperature}.
class HttpChatClient : public ChatClient {
 public:
  explicit HttpChatClient(LLMConfig config, std::shared_ptr<RequestGate> gate = nullptr);
  std::string complete(const std::vector<ChatMessage>& messages) override;
  std::size_t call_count() const override { return calls_; }

 private:
  std::string attempt(const std::string& key, const std::string& body);

  LLMConfig config_;
  std::shared_ptr<RequestGate> gate_;
  std::size_t calls_ = 0;
};

// One-shot completion through a fresh HttpChatClient.
std::string complete(const LLMConfig& config, const std::vector<ChatMessage>& messages);

// FNV-1a over role/content pairs, as 16 lowercase hex digits.
std::string hash_messages(const std::vector<ChatMessage>& messages);

// Script entries are tried in file order. An entry matches when every given
// selector holds: "hash" (hash_messages), "index" (zero-based call number of
// the client), "contains" (substrings of the last user message). An entry
// with only "default": true matches anything.
class MockScript {
 public:
  struct Entry {
    std::optional<std::string> hash;
    std::optional<std::size_t> index;
    std::vector<std::string> contains;
    std::string response;
  };

  static MockScript load(const std::filesystem::path& path);
  static MockScript from_json_text(const std::string& json_text);

  void add(Entry entry) { entries_.push_back(std::move(entry)); }
  std::optional<std::string> lookup(const std::vector<ChatMessage>& messages,
                                    std::size_t call_index) const;
  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::vector<Entry> entries_;
};

class MockChatClient : public ChatClient {
 public:
  explicit MockChatClient(std::shared_ptr<const MockScript> script);
  // Throws LlmError when no entry matches.
  std::string complete(const std::vector<ChatMessage>& messages) override;
  std::size_t call_count() const override { return log_.size(); }
  const std::vector<std::vector<ChatMessage>>& log() const { return log_; }

 private:
  std::shared_ptr<const MockScript> script_;
  std::vector<std::vector<ChatMessage>> log_;
};

using ChatClientFactory = std::function<std::unique_ptr<ChatClient>()>;

ChatClientFactory mock_client_factory(std::shared_ptr<const MockScript> script);
ChatClientFactory http_client_factory(const LLMConfig& config);

}  // namespace disambig
