#include "codebench/judge/verdict.hpp"

#include <atomic>
#include <exception>
#include <regex>
#include <thread>

#include "codebench/common/errors.hpp"

namespace codebench::judge {

namespace {

constexpr std::pair<Status, const char*> kStatusNames[] = {
    {Status::Accepted, "Accepted"},
    {Status::WrongAnswer, "WrongAnswer"},
    {Status::RuntimeError, "RuntimeError"},
    {Status::TimeLimitExceeded, "TimeLimitExceeded"},
    {Status::MemoryLimitExceeded, "MemoryLimitExceeded"}};

}  // namespace

std::string to_string(Status s) {
  for (const auto& [status, name] : kStatusNames) {
    if (status == s) return name;
  }
  return "?";
}

Status status_from_string(std::string_view s) {
  for (const auto& [status, name] : kStatusNames) {
    if (s == name) return status;
  }
  throw InvalidArgument("unknown verdict status: " + std::string(s));
}

void to_json(nlohmann::json& j, const Verdict& v) {
  j = {{"status", to_string(v.status)},
       {"tests_total", v.tests_total},
       {"tests_passed", v.tests_passed},
       {"error_info", v.error_info},
       {"runtime_ms", v.runtime_ms},
       {"peak_memory_mb", v.peak_memory_mb}};
}

void from_json(const nlohmann::json& j, Verdict& v) {
  v.status = status_from_string(j.at("status").get<std::string>());
  v.tests_total = j.at("tests_total").get<int>();
  v.tests_passed = j.at("tests_passed").get<int>();
  v.error_info = j.value("error_info", "");
  v.runtime_ms = j.value("runtime_ms", 0.0);
  v.peak_memory_mb = j.value("peak_memory_mb", 0.0);
}

std::vector<Verdict> judge_all(VerdictSource& source, const std::vector<Submission>& submissions,
                               const Limits& limits, int workers) {
  if (workers < 1) throw InvalidArgument("judge_all: worker count must be at least 1");
  std::vector<Verdict> out(submissions.size());
  std::vector<std::exception_ptr> errors(submissions.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < submissions.size(); i = next++) {
      try {
        out[i] = source.submit(submissions[i].solution, *submissions[i].problem, limits);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(workers), submissions.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::string entry_point(std::string_view framework) {
  static const std::regex cls(R"(^class\s+([A-Za-z_]\w*))");
  static const std::regex def(R"(^(\s*)def\s+([A-Za-z_]\w*)\s*\()");
  std::string text(framework);
  std::string klass;
  std::smatch m;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(pos, end - pos);
    if (std::regex_search(line, m, cls)) {
      if (klass.empty()) klass = m[1];
    } else if (std::regex_search(line, m, def)) {
      bool method = m[1].length() > 0;
      if (method && !klass.empty()) return klass + "." + m[2].str();
      if (!method) return m[2];
    }
    pos = end + 1;
  }
  throw MissingFramework("framework defines no function");
}

double percentile_rank(double value, const std::vector<double>& population) {
  if (population.empty()) throw EmptyPopulation("percentile_rank: empty population");
  std::size_t worse = 0;
  for (double p : population) {
    if (p > value) ++worse;
  }
  return 100.0 * static_cast<double>(worse) / static_cast<double>(population.size());
}

RankPair rank_verdict(const Verdict& v, const std::vector<Verdict>& population) {
  std::vector<double> runtimes, memory;
  for (const auto& p : population) {
    if (!p.accepted()) continue;
    runtimes.push_back(p.runtime_ms);
    memory.push_back(p.peak_memory_mb);
  }
  RankPair r;
  r.runtime_rank = percentile_rank(v.runtime_ms, runtimes);
  r.memory_rank = percentile_rank(v.peak_memory_mb, memory);
  r.population_size = static_cast<int>(runtimes.size());
  return r;
}

}  // namespace codebench::judge
