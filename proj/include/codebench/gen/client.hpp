#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace codebench::gen {

struct ChatMessage {
  std::string role;
  std::string content;
};

struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  double temperature = 1.0;
  int n = 1;
  int max_tokens = 4096;
  // Local bookkeeping, never sent over the wire.
  std::string problem_slug;
  int attempt = 1;

  // {model, messages: [{role, content}], temperature, n, max_tokens}
  nlohmann::json wire() const;
};

class ChatClient {
 public:
  virtual ~ChatClient() = default;
  // Returns the assistant message of the first choice. Throws ClientError.
  virtual std::string complete(const ChatRequest& request) = 0;
};

// Requests-per-minute limiter shared by every caller of a client. `acquire`
// blocks until a token is available. Clock and sleep are injectable for
// tests and measure seconds.
class TokenBucket {
 public:
  using NowFn = std::function<double()>;
  using SleepFn = std::function<void(double)>;

  explicit TokenBucket(double per_minute, double burst = 1, NowFn now = {}, SleepFn sleep = {});

  void acquire();
  double available();

 private:
  void refill();

  double rate_;  // tokens per second
  double burst_;
  double tokens_;
  double last_;
  NowFn now_;
  SleepFn sleep_;
  std::mutex mu_;
};

struct HttpClientOptions {
  std::string endpoint;  // scheme://host[:port]/path
  std::string api_key;
  int max_retries = 3;
  double backoff_s = 1.0;  // doubled after each retry
  int timeout_s = 120;
  std::shared_ptr<TokenBucket> bucket;
  TokenBucket::SleepFn sleep;  // defaults to a real sleep
};

// Reads the bearer token from the named environment variable. Throws
// ClientError when it is unset or empty.
std::string api_key_from_env(const std::string& variable = "CODEBENCH_API_KEY");

// Chat-completion client over HTTP(S). Transport failures, 429 and 5xx
// responses are retried with exponential backoff; other statuses and
// malformed bodies fail at once. Throws ClientError.
class HttpChatClient : public ChatClient {
 public:
  explicit HttpChatClient(HttpClientOptions options);
  ~HttpChatClient() override;

  std::string complete(const ChatRequest& request) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Replays canned transcripts. Each JSONL record is
//   {"slug": "<problem>", "replies": ["<attempt 1>", "<attempt 2>", ...]}
// and attempt k of a problem receives reply k. Every request is recorded.
class MockChatClient : public ChatClient {
 public:
  using Script = std::map<std::string, std::vector<std::string>>;

  MockChatClient() = default;
  explicit MockChatClient(Script script);
  static Script load_script(const std::filesystem::path& path);  // throws MalformedDump
  static MockChatClient from_file(const std::filesystem::path& path);

  void set(const std::string& slug, std::vector<std::string> replies);
  std::string complete(const ChatRequest& request) override;

  std::vector<ChatRequest> requests() const;

 private:
  std::map<std::string, std::vector<std::string>> script_;
  std::vector<ChatRequest> requests_;
  mutable std::mutex mu_;
};

}  // namespace codebench::gen
