#include "codebench/judge/shim.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <mutex>

#include "codebench/common/errors.hpp"
#include "codebench/common/text.hpp"

namespace codebench::judge {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

std::string describe_case(const corpus::TestCase& tc, int index) {
  return "test " + std::to_string(index + 1) + "\nInput:\n" + tc.input;
}

}  // namespace

SubprocessRunner::SubprocessRunner(std::vector<std::string> argv) : argv_(std::move(argv)) {
  if (argv_.empty()) throw InvalidArgument("runner command is empty");
}

SubprocessRunner::~SubprocessRunner() { stop(); }

void SubprocessRunner::start() {
  if (running()) return;
  static std::once_flag ignore_sigpipe;
  std::call_once(ignore_sigpipe, [] { signal(SIGPIPE, SIG_IGN); });
  int in[2], out[2];
  if (pipe2(in, O_CLOEXEC) != 0) throw RunnerUnavailable(std::string("pipe: ") + std::strerror(errno));
  if (pipe2(out, O_CLOEXEC) != 0) {
    close(in[0]);
    close(in[1]);
    throw RunnerUnavailable(std::string("pipe: ") + std::strerror(errno));
  }
  // Exec failure is reported through a close-on-exec pipe.
  int status_pipe[2];
  if (pipe2(status_pipe, O_CLOEXEC) != 0) throw RunnerUnavailable(std::string("pipe: ") + std::strerror(errno));

  std::vector<char*> args;
  for (auto& a : argv_) args.push_back(a.data());
  args.push_back(nullptr);

  pid_t pid = fork();
  if (pid < 0) throw RunnerUnavailable(std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    dup2(in[0], STDIN_FILENO);
    dup2(out[1], STDOUT_FILENO);
    close(in[0]);
    close(in[1]);
    close(out[0]);
    close(out[1]);
    close(status_pipe[0]);
    execvp(args[0], args.data());
    int err = errno;
    (void)!write(status_pipe[1], &err, sizeof err);
    _exit(127);
  }
  close(in[0]);
  close(out[1]);
  close(status_pipe[1]);
  int err = 0;
  ssize_t got = read(status_pipe[0], &err, sizeof err);
  close(status_pipe[0]);
  pid_ = pid;
  to_child_ = in[1];
  from_child_ = out[0];
  decoder_ = protocol::FrameDecoder{};
  if (got == static_cast<ssize_t>(sizeof err)) {
    stop();
    throw RunnerUnavailable("cannot execute '" + argv_[0] + "': " + std::strerror(err));
  }

  // Handshake: one line each way.
  try {
    write_all(std::string(protocol::kHello) + "\n");
  } catch (const RunnerUnavailable&) {
    stop();
    throw;
  }
  std::string line;
  auto deadline = Clock::now() + std::chrono::seconds(10);
  char c = 0;
  while (Clock::now() < deadline) {
    pollfd p{from_child_, POLLIN, 0};
    if (poll(&p, 1, 100) <= 0) continue;
    if (read(from_child_, &c, 1) != 1) break;
    if (c == '\n') {
      if (line == protocol::kHello) return;
      break;
    }
    line += c;
    if (line.size() > 64) break;
  }
  stop();
  throw RunnerUnavailable("runner handshake failed (got '" + line + "')");
}

void SubprocessRunner::stop() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  to_child_ = from_child_ = -1;
  if (pid_ > 0) {
    kill(pid_, SIGKILL);
    waitpid(pid_, nullptr, 0);
  }
  pid_ = -1;
}

void SubprocessRunner::write_all(const std::string& bytes) {
  std::size_t off = 0;
  while (off < bytes.size()) {
    ssize_t n = write(to_child_, bytes.data() + off, bytes.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw RunnerUnavailable(std::string("runner write failed: ") + std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
}

bool SubprocessRunner::read_some(int timeout_ms) {
  pollfd p{from_child_, POLLIN, 0};
  int r = poll(&p, 1, timeout_ms);
  if (r == 0) return false;
  if (r < 0) {
    if (errno == EINTR) return false;
    throw RunnerUnavailable(std::string("poll: ") + std::strerror(errno));
  }
  char buf[65536];
  ssize_t n = read(from_child_, buf, sizeof buf);
  if (n <= 0) throw RunnerUnavailable("runner closed its output");
  decoder_.feed(std::string_view(buf, static_cast<std::size_t>(n)));
  return true;
}

protocol::RunReply SubprocessRunner::run(const protocol::RunRequest& request) {
  start();
  auto t0 = Clock::now();
  double hard_limit = 2 * request.time_ms;
  try {
    write_all(protocol::encode_frame(protocol::encode(request)));
    for (;;) {
      if (auto frame = decoder_.next()) return protocol::decode_reply(*frame);
      double left = hard_limit - elapsed_ms(t0);
      if (left <= 0) break;
      read_some(static_cast<int>(left) + 1);
    }
  } catch (const ProtocolError&) {
    stop();
    throw;
  } catch (const RunnerUnavailable&) {
    stop();
    throw;
  }
  stop();
  protocol::RunReply timeout;
  timeout.outcome = protocol::Outcome::Timeout;
  timeout.wall_ms = elapsed_ms(t0);
  timeout.trace = "killed after " + text::fixed(timeout.wall_ms, 0) + " ms";
  return timeout;
}

ShimJudge::ShimJudge(std::vector<std::string> argv, int runners) {
  if (runners < 1) throw InvalidArgument("ShimJudge needs at least one runner");
  for (int i = 0; i < runners; ++i) {
    runners_.push_back(std::make_unique<SubprocessRunner>(argv));
    idle_.push_back(runners_.back().get());
  }
}

SubprocessRunner& ShimJudge::checkout() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [&] { return !idle_.empty(); });
  SubprocessRunner* r = idle_.back();
  idle_.pop_back();
  return *r;
}

void ShimJudge::checkin(SubprocessRunner& r) {
  {
    std::lock_guard lock(mu_);
    idle_.push_back(&r);
  }
  cv_.notify_one();
}

Verdict ShimJudge::submit(const std::string& solution, const corpus::Problem& problem, const Limits& limits) {
  if (problem.test_cases.empty()) throw InvalidArgument("problem '" + problem.slug + "' has no test cases");
  protocol::RunRequest req;
  req.solution = solution;
  req.entry = entry_point(problem.code_framework);
  req.time_ms = limits.time_ms;
  req.memory_mb = limits.memory_mb;

  SubprocessRunner& runner = checkout();
  std::vector<protocol::RunReply> replies;
  try {
    for (const auto& tc : problem.test_cases) {
      req.input = tc.input;
      replies.push_back(runner.run(req));
      Verdict partial = fold_replies(problem, replies, limits);
      if (!partial.accepted() && partial.tests_passed < static_cast<int>(replies.size())) break;
    }
  } catch (...) {
    checkin(runner);
    throw;
  }
  checkin(runner);
  return fold_replies(problem, replies, limits);
}

Verdict fold_replies(const corpus::Problem& problem, const std::vector<protocol::RunReply>& replies,
                     const Limits& limits) {
  Verdict v;
  v.tests_total = static_cast<int>(problem.test_cases.size());
  auto fail = [&](Status s, std::string info, int index) {
    v.status = s;
    v.tests_passed = index;
    v.error_info = std::move(info);
    return v;
  };
  for (std::size_t i = 0; i < replies.size() && i < problem.test_cases.size(); ++i) {
    const auto& r = replies[i];
    const auto& tc = problem.test_cases[i];
    int idx = static_cast<int>(i);
    switch (r.outcome) {
      case protocol::Outcome::Exception:
        return fail(Status::RuntimeError, "Runtime Error on " + describe_case(tc, idx) + "\n" + r.trace, idx);
      case protocol::Outcome::Timeout:
        v.runtime_ms = std::max({v.runtime_ms, r.wall_ms, limits.time_ms});
        return fail(Status::TimeLimitExceeded,
                    "Time Limit Exceeded on " + describe_case(tc, idx) + "\nLimit: " + text::fixed(limits.time_ms, 0) +
                        " ms",
                    idx);
      case protocol::Outcome::MemoryExceeded:
        v.peak_memory_mb = std::max({v.peak_memory_mb, r.peak_mb, limits.memory_mb});
        return fail(Status::MemoryLimitExceeded,
                    "Memory Limit Exceeded on " + describe_case(tc, idx) + "\nLimit: " +
                        text::fixed(limits.memory_mb, 0) + " MB",
                    idx);
      case protocol::Outcome::Ok:
        break;
    }
    if (r.wall_ms > limits.time_ms) {
      v.runtime_ms = std::max(v.runtime_ms, r.wall_ms);
      return fail(Status::TimeLimitExceeded, "Time Limit Exceeded on " + describe_case(tc, idx), idx);
    }
    if (r.peak_mb > limits.memory_mb) {
      v.peak_memory_mb = std::max(v.peak_memory_mb, r.peak_mb);
      return fail(Status::MemoryLimitExceeded, "Memory Limit Exceeded on " + describe_case(tc, idx), idx);
    }
    std::string got = text::normalize_trailing_whitespace(r.result);
    std::string want = text::normalize_trailing_whitespace(tc.expected);
    if (got != want) {
      return fail(Status::WrongAnswer,
                  "Wrong Answer on " + describe_case(tc, idx) + "\nExpected:\n" + want + "\nOutput:\n" + got, idx);
    }
    v.runtime_ms = std::max(v.runtime_ms, r.wall_ms);
    v.peak_memory_mb = std::max(v.peak_memory_mb, r.peak_mb);
    v.tests_passed = idx + 1;
  }
  if (v.tests_passed < v.tests_total) {
    v.status = Status::RuntimeError;
    v.error_info = "runner stopped after " + std::to_string(v.tests_passed) + " of " + std::to_string(v.tests_total) +
                   " tests";
  }
  return v;
}

}  // namespace codebench::judge
