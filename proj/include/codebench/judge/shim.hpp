#pragma once

#include <condition_variable>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "codebench/judge/protocol.hpp"
#include "codebench/judge/verdict.hpp"

namespace codebench::judge {

// One runner process speaking the line protocol over its stdin and stdout.
// The judge sends the handshake line and expects it echoed back. A request
// that gets no reply within twice its time limit kills the process; the next
// request starts a fresh one.
class SubprocessRunner {
 public:
  explicit SubprocessRunner(std::vector<std::string> argv);
  ~SubprocessRunner();
  SubprocessRunner(const SubprocessRunner&) = delete;
  SubprocessRunner& operator=(const SubprocessRunner&) = delete;

  // Starts the process and completes the handshake. Throws RunnerUnavailable.
  void start();
  bool running() const { return pid_ > 0; }

  // Sends one request and waits for its reply. A hard kill yields a Timeout
  // reply carrying the elapsed wall time. Throws RunnerUnavailable when the
  // process cannot be started or dies, ProtocolError on a malformed reply.
  protocol::RunReply run(const protocol::RunRequest& request);

  void stop();

 private:
  bool read_some(int timeout_ms);
  void write_all(const std::string& bytes);

  std::vector<std::string> argv_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  protocol::FrameDecoder decoder_;
};

// Judge backed by a pool of runner processes. Test cases run in order and
// stop at the first failure; outputs are compared after trailing whitespace
// normalization.
class ShimJudge : public VerdictSource {
 public:
  ShimJudge(std::vector<std::string> argv, int runners = 1);

  Verdict submit(const std::string& solution, const corpus::Problem& problem, const Limits& limits) override;

 private:
  SubprocessRunner& checkout();
  void checkin(SubprocessRunner& r);

  std::vector<std::unique_ptr<SubprocessRunner>> runners_;
  std::vector<SubprocessRunner*> idle_;
  std::mutex mu_;
  std::condition_variable cv_;
};

// Maps the replies of one submission onto a verdict. Exposed for testing.
Verdict fold_replies(const corpus::Problem& problem, const std::vector<protocol::RunReply>& replies,
                     const Limits& limits);

}  // namespace codebench::judge
