#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "codebench/corpus/model.hpp"
#include "codebench/gen/client.hpp"
#include "codebench/gen/prompt.hpp"
#include "codebench/judge/verdict.hpp"

namespace codebench::gen {

enum class GenerationStatus { Accepted, Invalid };

std::string to_string(GenerationStatus s);

struct AttemptRecord {
  Prompt prompt;
  std::string raw_reply;
  std::optional<std::string> extracted_code;  // absent when the reply had no code
  judge::Verdict verdict;
  std::vector<std::string> flags;  // "no_code_found", "empty_error_info", "prompt_truncated", "judge_error"
};

struct GenerationOutcome {
  std::string problem_slug;
  GenerationStatus status = GenerationStatus::Invalid;
  int attempts_used = 0;
  std::optional<std::string> final_code;
  std::vector<AttemptRecord> attempt_log;
};

void to_json(nlohmann::json& j, const AttemptRecord& a);
void from_json(const nlohmann::json& j, AttemptRecord& a);
void to_json(nlohmann::json& j, const GenerationOutcome& o);
void from_json(const nlohmann::json& j, GenerationOutcome& o);

inline constexpr const char* kNoCodeError = "The reply did not contain a Python code block.";

// Initial prompt, then fixing prompts built from the previous verdict's
// error and code, until the judge accepts or max_attempts is reached. A reply
// without code is a failed attempt. Judge exceptions become RuntimeError
// verdicts. Propagates ClientError, and PromptBudgetExceeded when the initial
// prompt does not fit.
GenerationOutcome generate_solution(const corpus::Problem& problem, ChatClient& client, judge::VerdictSource& judge,
                                    const GenerationConfig& config, const judge::Limits& limits = {});

}  // namespace codebench::gen
