#include "codebench/gen/client.hpp"

#include <chrono>
#include <cstdlib>
#include <regex>
#include <thread>

#include <httplib.h>

#include "codebench/common/errors.hpp"
#include "codebench/common/jsonl.hpp"

namespace codebench::gen {

using nlohmann::json;

namespace {

double steady_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

void real_sleep(double seconds) {
  if (seconds > 0) std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
}

}  // namespace

json ChatRequest::wire() const {
  json msgs = json::array();
  for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
  return {{"model", model}, {"messages", msgs}, {"temperature", temperature}, {"n", n}, {"max_tokens", max_tokens}};
}

TokenBucket::TokenBucket(double per_minute, double burst, NowFn now, SleepFn sleep)
    : rate_(per_minute / 60.0),
      burst_(burst),
      tokens_(burst),
      now_(now ? std::move(now) : NowFn(steady_seconds)),
      sleep_(sleep ? std::move(sleep) : SleepFn(real_sleep)) {
  if (!(per_minute > 0)) throw InvalidArgument("token bucket rate must be positive");
  if (!(burst >= 1)) throw InvalidArgument("token bucket burst must be at least 1");
  last_ = now_();
}

void TokenBucket::refill() {
  double t = now_();
  tokens_ = std::min(burst_, tokens_ + (t - last_) * rate_);
  last_ = t;
}

double TokenBucket::available() {
  std::lock_guard lock(mu_);
  refill();
  return tokens_;
}

void TokenBucket::acquire() {
  std::unique_lock lock(mu_);
  for (;;) {
    refill();
    if (tokens_ >= 1) {
      tokens_ -= 1;
      return;
    }
    double wait = (1 - tokens_) / rate_;
    lock.unlock();
    sleep_(wait);
    lock.lock();
  }
}

std::string api_key_from_env(const std::string& variable) {
  const char* v = std::getenv(variable.c_str());
  if (!v || !*v) throw ClientError("environment variable " + variable + " is not set");
  return v;
}

struct HttpChatClient::Impl {
  HttpClientOptions opt;
  std::string base;  // scheme://host:port
  std::string path;
  std::unique_ptr<httplib::Client> client;
  std::mutex mu;
};

HttpChatClient::HttpChatClient(HttpClientOptions options) : impl_(std::make_unique<Impl>()) {
  static const std::regex url(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(options.endpoint, m, url)) throw ClientError("bad endpoint URL: " + options.endpoint);
  if (options.max_retries < 0) throw InvalidArgument("max_retries must be non-negative");
  if (!options.sleep) options.sleep = real_sleep;
  impl_->base = m[1];
  impl_->path = m[2].matched ? m[2].str() : "/";
  impl_->opt = std::move(options);
  impl_->client = std::make_unique<httplib::Client>(impl_->base);
  impl_->client->set_connection_timeout(impl_->opt.timeout_s, 0);
  impl_->client->set_read_timeout(impl_->opt.timeout_s, 0);
  impl_->client->set_write_timeout(impl_->opt.timeout_s, 0);
  if (!impl_->opt.api_key.empty()) impl_->client->set_bearer_token_auth(impl_->opt.api_key);
}

HttpChatClient::~HttpChatClient() = default;

std::string HttpChatClient::complete(const ChatRequest& request) {
  std::string body = request.wire().dump();
  std::string last_error;
  double backoff = impl_->opt.backoff_s;
  for (int attempt = 0; attempt <= impl_->opt.max_retries; ++attempt) {
    if (attempt > 0) {
      impl_->opt.sleep(backoff);
      backoff *= 2;
    }
    if (impl_->opt.bucket) impl_->opt.bucket->acquire();
    httplib::Result res;
    {
      std::lock_guard lock(impl_->mu);
      res = impl_->client->Post(impl_->path, body, "application/json");
    }
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) throw ClientError("HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
    json j = json::parse(res->body, nullptr, false);
    if (j.is_discarded()) throw ClientError("response body is not JSON");
    try {
      return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception&) {
      throw ClientError("response has no choices[0].message.content");
    }
  }
  throw ClientError("giving up after " + std::to_string(impl_->opt.max_retries + 1) + " tries: " + last_error);
}

MockChatClient::MockChatClient(Script script) : script_(std::move(script)) {}

MockChatClient::Script MockChatClient::load_script(const std::filesystem::path& path) {
  Script script;
  jsonl::for_each(path, [&](const json& rec, std::size_t index) {
    try {
      script[rec.at("slug").get<std::string>()] = rec.at("replies").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
      throw MalformedDump("transcript record " + std::to_string(index) + ": " + e.what());
    }
  });
  return script;
}

MockChatClient MockChatClient::from_file(const std::filesystem::path& path) { return MockChatClient(load_script(path)); }

void MockChatClient::set(const std::string& slug, std::vector<std::string> replies) {
  std::lock_guard lock(mu_);
  script_[slug] = std::move(replies);
}

std::string MockChatClient::complete(const ChatRequest& request) {
  std::lock_guard lock(mu_);
  requests_.push_back(request);
  auto it = script_.find(request.problem_slug);
  if (it == script_.end()) throw ClientError("no transcript for problem '" + request.problem_slug + "'");
  if (request.attempt < 1 || static_cast<std::size_t>(request.attempt) > it->second.size())
    throw ClientError("transcript for '" + request.problem_slug + "' has no reply for attempt " +
                      std::to_string(request.attempt));
  return it->second[static_cast<std::size_t>(request.attempt) - 1];
}

std::vector<ChatRequest> MockChatClient::requests() const {
  std::lock_guard lock(mu_);
  return requests_;
}

}  // namespace codebench::gen
