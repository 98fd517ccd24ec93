#include "codebench/judge/canned.hpp"

#include <regex>

#include "codebench/common/errors.hpp"
#include "codebench/common/hash.hpp"
#include "codebench/common/text.hpp"
#include "codebench/metrics/complexity.hpp"
#include "codebench/metrics/record.hpp"
#include "codebench/pysyntax/tree.hpp"

namespace codebench::judge {

namespace {

bool defines_entry(const pysyntax::StructureTree& tree, const std::string& entry) {
  auto dot = entry.find('.');
  auto has_def = [](const std::vector<pysyntax::Node>& body, std::string_view name) {
    for (const auto& n : body) {
      if (n.kind == pysyntax::NodeKind::FunctionDef && n.name == name) return true;
    }
    return false;
  };
  if (dot == std::string::npos) return has_def(tree.root.body, entry);
  std::string klass = entry.substr(0, dot);
  for (const auto& n : tree.root.body) {
    if (n.kind == pysyntax::NodeKind::ClassDef && n.name == klass && has_def(n.body, entry.substr(dot + 1)))
      return true;
  }
  return false;
}

}  // namespace

CannedJudge::CannedJudge(CostModel cost, imports::ImportMapping mapping)
    : cost_(cost), mapping_(std::move(mapping)) {}

void CannedJudge::add(std::string_view solution, Verdict verdict) {
  std::lock_guard lock(mu_);
  table_[sha256_hex(solution)] = std::move(verdict);
}

void CannedJudge::load(const nlohmann::json& table) {
  std::lock_guard lock(mu_);
  for (const auto& [hash, v] : table.at("verdicts").items()) table_[hash] = v.get<Verdict>();
}

Verdict CannedJudge::submit(const std::string& solution, const corpus::Problem& problem, const Limits&) {
  Verdict v;
  v.tests_total = static_cast<int>(problem.test_cases.size());
  {
    std::lock_guard lock(mu_);
    auto it = table_.find(sha256_hex(solution));
    if (it != table_.end()) return it->second;
  }
  auto fail = [&](Status s, std::string info, int passed = 0) {
    v.status = s;
    v.tests_passed = std::clamp(passed, 0, std::max(0, v.tests_total - 1));
    v.error_info = std::move(info);
    return v;
  };

  static const std::regex directive(R"(^[ \t]*#[ \t]*judge:[ \t]*([A-Za-z]+)(?:[ \t]+(\d+))?)");
  std::smatch m;
  std::string normalized = text::normalize_newlines(solution);
  for (auto line : text::split_lines(normalized)) {
    std::string s(line);
    if (!std::regex_search(s, m, directive)) continue;
    Status forced = status_from_string(m[1].str());
    if (forced == Status::Accepted) break;
    int passed = m[2].matched ? std::stoi(m[2]) : 0;
    return fail(forced, to_string(forced) + " on test " + std::to_string(std::min(passed, v.tests_total - 1) + 1),
                passed);
  }

  pysyntax::StructureTree tree;
  try {
    tree = pysyntax::parse_source(solution);
  } catch (const LexError& e) {
    return fail(Status::RuntimeError, std::string("SyntaxError: ") + e.what());
  }
  std::string entry = entry_point(problem.code_framework);
  if (!defines_entry(tree, entry)) return fail(Status::RuntimeError, "AttributeError: no attribute '" + entry + "'");

  auto undefined = imports::find_undefined(tree);
  for (const auto& p : mapping_.provided) undefined.erase(p);
  if (!undefined.empty())
    return fail(Status::RuntimeError, "NameError: name '" + *undefined.begin() + "' is not defined");

  int ncloc = metrics::line_counts(solution).ncloc;
  int complexity = metrics::cognitive_complexity(tree).total;
  v.status = Status::Accepted;
  v.tests_passed = v.tests_total;
  v.runtime_ms = cost_.base_ms + cost_.ms_per_line * ncloc + cost_.ms_per_complexity * complexity;
  v.peak_memory_mb = cost_.base_mb + cost_.mb_per_line * ncloc + cost_.mb_per_complexity * complexity;
  return v;
}

}  // namespace codebench::judge
