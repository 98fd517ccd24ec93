#include "codebench/gen/loop.hpp"

#include "codebench/common/errors.hpp"
#include "codebench/common/text.hpp"

namespace codebench::gen {

using nlohmann::json;

std::string to_string(GenerationStatus s) { return s == GenerationStatus::Accepted ? "Accepted" : "Invalid"; }

void to_json(json& j, const AttemptRecord& a) {
  j = {{"prompt", a.prompt}, {"raw_reply", a.raw_reply}, {"verdict", a.verdict}, {"flags", a.flags}};
  j["extracted_code"] = a.extracted_code ? json(*a.extracted_code) : json(nullptr);
}

void from_json(const json& j, AttemptRecord& a) {
  a.prompt = j.at("prompt").get<Prompt>();
  a.raw_reply = j.at("raw_reply").get<std::string>();
  a.verdict = j.at("verdict").get<judge::Verdict>();
  a.flags = j.value("flags", std::vector<std::string>{});
  const auto& code = j.at("extracted_code");
  a.extracted_code = code.is_null() ? std::nullopt : std::optional<std::string>(code.get<std::string>());
}

void to_json(json& j, const GenerationOutcome& o) {
  j = {{"problem_slug", o.problem_slug},
       {"status", to_string(o.status)},
       {"attempts_used", o.attempts_used},
       {"attempt_log", o.attempt_log}};
  j["final_code"] = o.final_code ? json(*o.final_code) : json(nullptr);
}

void from_json(const json& j, GenerationOutcome& o) {
  o.problem_slug = j.at("problem_slug").get<std::string>();
  o.status = j.at("status").get<std::string>() == "Accepted" ? GenerationStatus::Accepted : GenerationStatus::Invalid;
  o.attempts_used = j.at("attempts_used").get<int>();
  o.attempt_log = j.at("attempt_log").get<std::vector<AttemptRecord>>();
  const auto& code = j.at("final_code");
  o.final_code = code.is_null() ? std::nullopt : std::optional<std::string>(code.get<std::string>());
}

GenerationOutcome generate_solution(const corpus::Problem& problem, ChatClient& client, judge::VerdictSource& judge,
                                    const GenerationConfig& config, const judge::Limits& limits) {
  config.validate();
  GenerationOutcome out;
  out.problem_slug = problem.slug;
  Prompt prompt = build_initial_prompt(problem, config.prompt_budget());
  std::vector<std::string> carried_flags;

  for (int attempt = 1; attempt <= config.max_attempts; ++attempt) {
    AttemptRecord rec;
    rec.flags = std::move(carried_flags);
    carried_flags.clear();
    if (prompt.truncated) rec.flags.push_back("prompt_truncated");
    rec.prompt = prompt;

    ChatRequest req;
    req.model = config.model_name;
    req.messages = {{"user", prompt.text}};
    req.temperature = config.temperature;
    req.n = config.samples_per_call;
    req.max_tokens = config.max_total_tokens;
    req.problem_slug = problem.slug;
    req.attempt = attempt;
    rec.raw_reply = client.complete(req);

    std::string faulty;
    try {
      rec.extracted_code = extract_fenced_code(rec.raw_reply);
      faulty = *rec.extracted_code;
      try {
        rec.verdict = judge.submit(*rec.extracted_code, problem, limits);
      } catch (const Error& e) {
        rec.flags.push_back("judge_error");
        rec.verdict.status = judge::Status::RuntimeError;
        rec.verdict.tests_total = static_cast<int>(problem.test_cases.size());
        rec.verdict.error_info = std::string("judge failure: ") + e.what();
      }
    } catch (const NoCodeFound&) {
      rec.flags.push_back("no_code_found");
      rec.verdict.status = judge::Status::RuntimeError;
      rec.verdict.tests_total = static_cast<int>(problem.test_cases.size());
      rec.verdict.error_info = kNoCodeError;
      faulty = rec.raw_reply;
    }

    out.attempts_used = attempt;
    bool accepted = rec.verdict.accepted();
    judge::Verdict verdict = rec.verdict;
    out.attempt_log.push_back(std::move(rec));
    if (accepted) {
      out.status = GenerationStatus::Accepted;
      out.final_code = out.attempt_log.back().extracted_code;
      return out;
    }
    if (attempt < config.max_attempts) {
      if (text::is_blank(verdict.error_info)) carried_flags.push_back("empty_error_info");
      prompt = build_fixing_prompt(problem, verdict.error_info, faulty, attempt + 1, config.max_attempts,
                                   config.prompt_budget());
    }
  }
  out.status = GenerationStatus::Invalid;
  return out;
}

}  // namespace codebench::gen
