#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "codebench/corpus/model.hpp"

namespace codebench::gen {

struct GenerationConfig {
  std::string model_name = "gpt-4o-2024-05-13";
  double temperature = 1.0;
  int samples_per_call = 1;
  int max_total_tokens = 4096;
  int max_attempts = 5;
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string api_key_env = "CODEBENCH_API_KEY";

  // Prompts never exceed four characters per token of the total limit.
  std::size_t prompt_budget() const { return 4 * static_cast<std::size_t>(max_total_tokens); }

  void validate() const;  // throws ConfigError
};

void to_json(nlohmann::json& j, const GenerationConfig& c);
void from_json(const nlohmann::json& j, GenerationConfig& c);

enum class PromptKind { Initial, Fixing };

std::string to_string(PromptKind k);

struct Prompt {
  std::string text;
  PromptKind kind = PromptKind::Initial;
  int attempt_index = 1;
  bool truncated = false;  // error or code section shortened to fit the budget

  bool operator==(const Prompt&) const = default;
};

void to_json(nlohmann::json& j, const Prompt& p);
void from_json(const nlohmann::json& j, Prompt& p);

// Command, the description between triple quotes, a second command, then
// the framework in a python fence. Triple quotes and fences inside the
// problem text are defused so each delimiter appears exactly once. Throws
// MissingFramework for an empty framework, InvalidArgument for an empty
// description and PromptBudgetExceeded when the prompt exceeds `budget`.
Prompt build_initial_prompt(const corpus::Problem& problem, std::size_t budget = 4 * 4096);

// Command, the restated problem, the error announced and quoted, the faulty
// code announced and fenced, in that order. The error and then the code are
// shortened to fit `budget`. Throws InvalidArgument unless
// 2 <= attempt <= max_attempts, PromptBudgetExceeded when even the empty
// sections do not fit.
Prompt build_fixing_prompt(const corpus::Problem& problem, std::string_view error_info, std::string_view faulty_code,
                           int attempt, int max_attempts = 5, std::size_t budget = 4 * 4096);

// Body of the last fenced block whose hint is empty or names the subject
// language. An unclosed final fence runs to the end of the reply. Throws
// NoCodeFound.
std::string extract_fenced_code(std::string_view reply);

}  // namespace codebench::gen
