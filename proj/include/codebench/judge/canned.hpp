#pragma once

#include <map>
#include <mutex>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "codebench/judge/verdict.hpp"
#include "codebench/repair/imports.hpp"

namespace codebench::judge {

// Deterministic stand-in for runtime and memory, linear in code lines and
// cognitive complexity.
struct CostModel {
  double base_ms = 20;
  double ms_per_line = 1.5;
  double ms_per_complexity = 4;
  double base_mb = 16;
  double mb_per_line = 0.25;
  double mb_per_complexity = 0.5;
};

// Judge fake that never executes code. In order:
//   1. a verdict registered for the exact solution text is returned;
//   2. a "# judge: <Status> [passed]" comment line forces that status;
//   3. a lexer error is a RuntimeError carrying a SyntaxError;
//   4. a missing entry point is a RuntimeError carrying an AttributeError;
//   5. a name with no binding, builtin or harness definition is a
//      RuntimeError carrying a NameError, as an interpreter without implicit
//      imports would raise;
//   6. otherwise Accepted, with runtime and memory from the cost model.
class CannedJudge : public VerdictSource {
 public:
  explicit CannedJudge(CostModel cost = {}, imports::ImportMapping mapping = imports::ImportMapping::defaults());

  void add(std::string_view solution, Verdict verdict);

  // {"verdicts": {"<sha256 of solution>": Verdict, ...}}
  void load(const nlohmann::json& table);

  Verdict submit(const std::string& solution, const corpus::Problem& problem, const Limits& limits) override;

 private:
  CostModel cost_;
  imports::ImportMapping mapping_;
  std::map<std::string, Verdict> table_;
  mutable std::mutex mu_;
};

}  // namespace codebench::judge
