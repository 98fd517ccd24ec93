#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace codebench::judge::protocol {

inline constexpr std::string_view kHello = "HELLO v1";
inline constexpr std::size_t kMaxFrame = 64u << 20;

// "<decimal length>\n<payload bytes>"
std::string encode_frame(std::string_view payload);

// Incremental frame parser. Feed bytes as they arrive and pop complete
// payloads. Throws ProtocolError on a malformed length line or a frame larger
// than kMaxFrame.
class FrameDecoder {
 public:
  void feed(std::string_view bytes);
  std::optional<std::string> next();
  bool idle() const { return buffer_.empty() && ready_.empty(); }

 private:
  void parse();

  std::string buffer_;
  std::optional<std::size_t> pending_;
  std::deque<std::string> ready_;
};

struct RunRequest {
  std::string solution;
  std::string entry;  // "Class.method" or "function"
  std::string input;
  double time_ms = 10000;
  double memory_mb = 512;

  bool operator==(const RunRequest&) const = default;
};

enum class Outcome { Ok, Exception, Timeout, MemoryExceeded };

std::string to_string(Outcome o);
Outcome outcome_from_string(std::string_view s);  // throws ProtocolError

struct RunReply {
  Outcome outcome = Outcome::Ok;
  std::string result;
  std::string trace;
  double wall_ms = 0;
  double peak_mb = 0;

  bool operator==(const RunReply&) const = default;
};

// Payloads are compact JSON objects with sorted keys.
std::string encode(const RunRequest& r);
std::string encode(const RunReply& r);
RunRequest decode_request(std::string_view payload);  // throws ProtocolError
RunReply decode_reply(std::string_view payload);      // throws ProtocolError, also for "ERR <code>"

}  // namespace codebench::judge::protocol
