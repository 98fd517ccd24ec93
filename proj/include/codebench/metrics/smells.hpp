#pragma once

#include <functional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "codebench/pysyntax/token.hpp"
#include "codebench/pysyntax/tree.hpp"

namespace codebench::metrics {

enum class Severity { Low, Medium, High };

std::string_view to_string(Severity severity);

struct Finding {
  std::string rule_id;
  pysyntax::Span span;
  std::string message;

  bool operator==(const Finding&) const = default;
};

struct SmellReport {
  std::vector<Finding> findings;  // ordered by span, then rule_id
  int count = 0;
};

struct SmellConfig {
  int max_parameters = 7;   // too-many-parameters fires above this
  int max_complexity = 15;  // function-too-complex fires above this
  std::set<std::string> disabled;

  // Reads {"max_parameters", "max_complexity", "disabled"}; missing keys keep
  // their defaults. Throws ConfigError on unknown rule ids or bad values.
  static SmellConfig from_json(const nlohmann::json& j);
};

// Shared per-snippet facts handed to every rule.
struct SmellContext {
  const pysyntax::StructureTree& tree;
  const std::vector<pysyntax::Token>& tokens;
  const std::set<std::string>& builtins;
  const SmellConfig& config;
};

struct SmellRule {
  std::string id;
  Severity severity = Severity::Medium;
  std::string description;
  std::function<void(const SmellContext&, std::vector<Finding>&)> check;
};

// The ten built-in rules in registration order.
const std::vector<SmellRule>& smell_registry();

// Names of Python builtins from the embedded data file.
const std::set<std::string>& python_builtins();

SmellReport count_smells(const pysyntax::StructureTree& tree, std::string_view source, const SmellConfig& config = {});

// Same as count_smells with an explicit rule list.
SmellReport count_smells_with(const std::vector<SmellRule>& rules, const pysyntax::StructureTree& tree,
                              std::string_view source, const SmellConfig& config = {});

}  // namespace codebench::metrics
