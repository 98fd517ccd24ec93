#include "codebench/judge/protocol.hpp"

#include <charconv>

#include "codebench/common/errors.hpp"

namespace codebench::judge::protocol {

using nlohmann::json;

std::string encode_frame(std::string_view payload) {
  std::string out = std::to_string(payload.size());
  out += '\n';
  out.append(payload);
  return out;
}

void FrameDecoder::feed(std::string_view bytes) {
  buffer_.append(bytes);
  parse();
}

std::optional<std::string> FrameDecoder::next() {
  if (ready_.empty()) return std::nullopt;
  std::string out = std::move(ready_.front());
  ready_.pop_front();
  return out;
}

void FrameDecoder::parse() {
  std::size_t pos = 0;
  for (;;) {
    if (!pending_) {
      std::size_t nl = buffer_.find('\n', pos);
      if (nl == std::string::npos) {
        if (buffer_.size() - pos > 20) throw ProtocolError("frame length line too long");
        break;
      }
      std::string_view digits(buffer_.data() + pos, nl - pos);
      std::size_t len = 0;
      auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), len);
      if (digits.empty() || ec != std::errc() || end != digits.data() + digits.size())
        throw ProtocolError("bad frame length: '" + std::string(digits.substr(0, 32)) + "'");
      if (len > kMaxFrame) throw ProtocolError("frame of " + std::to_string(len) + " bytes exceeds the limit");
      pending_ = len;
      pos = nl + 1;
    }
    if (buffer_.size() - pos < *pending_) break;
    ready_.push_back(buffer_.substr(pos, *pending_));
    pos += *pending_;
    pending_.reset();
  }
  buffer_.erase(0, pos);
}

namespace {

constexpr std::pair<Outcome, const char*> kOutcomes[] = {{Outcome::Ok, "Ok"},
                                                         {Outcome::Exception, "Exception"},
                                                         {Outcome::Timeout, "Timeout"},
                                                         {Outcome::MemoryExceeded, "MemoryExceeded"}};

json parse_object(std::string_view payload) {
  if (payload.substr(0, 4) == "ERR ") throw ProtocolError("runner reported " + std::string(payload));
  json j = json::parse(payload.begin(), payload.end(), nullptr, false);
  if (!j.is_object()) throw ProtocolError("payload is not a JSON object");
  return j;
}

}  // namespace

std::string to_string(Outcome o) {
  for (const auto& [outcome, name] : kOutcomes) {
    if (outcome == o) return name;
  }
  return "?";
}

Outcome outcome_from_string(std::string_view s) {
  for (const auto& [outcome, name] : kOutcomes) {
    if (s == name) return outcome;
  }
  throw ProtocolError("unknown outcome: " + std::string(s));
}

std::string encode(const RunRequest& r) {
  json j = {{"solution", r.solution},
            {"entry", r.entry},
            {"input", r.input},
            {"time_ms", r.time_ms},
            {"memory_mb", r.memory_mb}};
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::string encode(const RunReply& r) {
  json j = {{"outcome", to_string(r.outcome)},
            {"result", r.result},
            {"trace", r.trace},
            {"wall_ms", r.wall_ms},
            {"peak_mb", r.peak_mb}};
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

RunRequest decode_request(std::string_view payload) {
  json j = parse_object(payload);
  try {
    RunRequest r;
    r.solution = j.at("solution").get<std::string>();
    r.entry = j.at("entry").get<std::string>();
    r.input = j.at("input").get<std::string>();
    r.time_ms = j.at("time_ms").get<double>();
    r.memory_mb = j.at("memory_mb").get<double>();
    return r;
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("bad request: ") + e.what());
  }
}

RunReply decode_reply(std::string_view payload) {
  json j = parse_object(payload);
  try {
    RunReply r;
    r.outcome = outcome_from_string(j.at("outcome").get<std::string>());
    r.result = j.value("result", "");
    r.trace = j.value("trace", "");
    r.wall_ms = j.value("wall_ms", 0.0);
    r.peak_mb = j.value("peak_mb", 0.0);
    return r;
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("bad reply: ") + e.what());
  }
}

}  // namespace codebench::judge::protocol
