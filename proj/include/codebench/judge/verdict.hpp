#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "codebench/corpus/model.hpp"

namespace codebench::judge {

enum class Status { Accepted, WrongAnswer, RuntimeError, TimeLimitExceeded, MemoryLimitExceeded };

std::string to_string(Status s);
Status status_from_string(std::string_view s);  // throws InvalidArgument

struct Verdict {
  Status status = Status::Accepted;
  int tests_total = 0;
  int tests_passed = 0;
  std::string error_info;  // empty for Accepted
  double runtime_ms = 0;
  double peak_memory_mb = 0;

  bool accepted() const { return status == Status::Accepted; }
  bool operator==(const Verdict&) const = default;
};

void to_json(nlohmann::json& j, const Verdict& v);
void from_json(const nlohmann::json& j, Verdict& v);

struct Limits {
  double time_ms = 10000;
  double memory_mb = 512;
};

// Anything that can turn a solution into a verdict. Implementations must be
// safe to call from several threads at once.
class VerdictSource {
 public:
  virtual ~VerdictSource() = default;
  virtual Verdict submit(const std::string& solution, const corpus::Problem& problem, const Limits& limits) = 0;
};

struct Submission {
  std::string id;
  std::string solution;
  const corpus::Problem* problem = nullptr;
};

// Judges every submission with up to `workers` concurrent calls. Results are
// ordered like the input whatever the completion order.
std::vector<Verdict> judge_all(VerdictSource& source, const std::vector<Submission>& submissions,
                               const Limits& limits, int workers = 1);

// "Solution.twoSum" for a class framework, "twoSum" for a bare function.
// Throws MissingFramework when no def is present.
std::string entry_point(std::string_view framework);

// 100 * |{p in population : p > value}| / |population|. Lower values are
// better, so the result is the share of the population strictly worse.
// Throws EmptyPopulation.
double percentile_rank(double value, const std::vector<double>& population);

struct RankPair {
  double runtime_rank = 0;
  double memory_rank = 0;
  int population_size = 0;
};

// Ranks an accepted verdict against the runtimes and memory figures of the
// accepted population. Throws EmptyPopulation.
RankPair rank_verdict(const Verdict& v, const std::vector<Verdict>& population);

}  // namespace codebench::judge
