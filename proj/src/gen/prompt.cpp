#include "codebench/gen/prompt.hpp"

#include "codebench/common/errors.hpp"
#include "codebench/common/text.hpp"
#include "codebench/corpus/corpus.hpp"
#include "codebench/lang/detect.hpp"

namespace codebench::gen {

namespace {

constexpr std::string_view kQuotes = "\"\"\"";
constexpr std::string_view kFence = "```";
constexpr std::string_view kTruncated = "\n[truncated]";

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size()))
    s.replace(pos, from.size(), to);
  return s;
}

// Keeps delimiters unique inside the assembled prompt.
std::string defuse(std::string_view s) {
  std::string out = replace_all(std::string(s), kFence, "'''");
  return replace_all(std::move(out), kQuotes, "'''");
}

std::string defuse_code(std::string_view s) { return replace_all(std::string(s), kFence, "'''"); }

std::string chomp(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
  return s;
}

// Shortens to at most `cap` bytes on a UTF-8 boundary, marking the cut.
std::string clip(std::string s, std::size_t cap, bool& clipped) {
  if (s.size() <= cap) return s;
  clipped = true;
  if (cap < kTruncated.size()) return "";
  std::size_t keep = cap - kTruncated.size();
  while (keep > 0 && (static_cast<unsigned char>(s[keep]) & 0xC0) == 0x80) --keep;
  s.resize(keep);
  s += kTruncated;
  return s;
}

std::string problem_block(const corpus::Problem& p) {
  std::string desc = chomp(defuse(p.description));
  return std::string(kQuotes) + "\n" + desc + "\n" + std::string(kQuotes) + "\n";
}

std::string code_block(std::string_view code) {
  return std::string(kFence) + "python\n" + chomp(defuse_code(code)) + "\n" + std::string(kFence) + "\n";
}

void check_problem(const corpus::Problem& p) {
  if (text::is_blank(p.code_framework)) throw MissingFramework("problem '" + p.slug + "' has no code framework");
  if (text::is_blank(p.description)) throw InvalidArgument("problem '" + p.slug + "' has no description");
}

std::string assemble_fixing(const corpus::Problem& p, const std::string& error, const std::string& code) {
  return "The Python 3 code at the end of this message was written for the coding problem below and "
         "failed when it was submitted. Correct the error and reply with the complete corrected code only, "
         "without explanations.\n\n" +
         problem_block(p) + "\nThe submission reported the following error:\n\n" + std::string(kQuotes) + "\n" +
         error + "\n" + std::string(kQuotes) + "\n\nThis is the faulty code:\n\n" + code_block(code);
}

}  // namespace

void GenerationConfig::validate() const {
  if (model_name.empty()) throw ConfigError("generation: model_name is empty");
  if (!(temperature >= 0 && temperature <= 2)) throw ConfigError("generation: temperature must lie in [0, 2]");
  if (samples_per_call < 1) throw ConfigError("generation: samples_per_call must be at least 1");
  if (max_total_tokens <= 0) throw ConfigError("generation: max_total_tokens must be positive");
  if (max_attempts < 1) throw ConfigError("generation: max_attempts must be at least 1");
}

void to_json(nlohmann::json& j, const GenerationConfig& c) {
  j = {{"model_name", c.model_name},
       {"temperature", c.temperature},
       {"samples_per_call", c.samples_per_call},
       {"max_total_tokens", c.max_total_tokens},
       {"max_attempts", c.max_attempts},
       {"endpoint", c.endpoint},
       {"api_key_env", c.api_key_env}};
}

void from_json(const nlohmann::json& j, GenerationConfig& c) {
  GenerationConfig d;
  c.model_name = j.value("model_name", d.model_name);
  c.temperature = j.value("temperature", d.temperature);
  c.samples_per_call = j.value("samples_per_call", d.samples_per_call);
  c.max_total_tokens = j.value("max_total_tokens", d.max_total_tokens);
  c.max_attempts = j.value("max_attempts", d.max_attempts);
  c.endpoint = j.value("endpoint", d.endpoint);
  c.api_key_env = j.value("api_key_env", d.api_key_env);
}

std::string to_string(PromptKind k) { return k == PromptKind::Initial ? "Initial" : "Fixing"; }

void to_json(nlohmann::json& j, const Prompt& p) {
  j = {{"text", p.text}, {"kind", to_string(p.kind)}, {"attempt_index", p.attempt_index}, {"truncated", p.truncated}};
}

void from_json(const nlohmann::json& j, Prompt& p) {
  p.text = j.at("text").get<std::string>();
  p.kind = j.at("kind").get<std::string>() == "Fixing" ? PromptKind::Fixing : PromptKind::Initial;
  p.attempt_index = j.at("attempt_index").get<int>();
  p.truncated = j.value("truncated", false);
}

Prompt build_initial_prompt(const corpus::Problem& problem, std::size_t budget) {
  check_problem(problem);
  Prompt p;
  p.kind = PromptKind::Initial;
  p.attempt_index = 1;
  p.text = "Write a solution in Python 3 for the coding problem below. Reply with code only, without "
           "explanations.\n\n" +
           problem_block(problem) + "\nUse the following code framework for the solution:\n\n" +
           code_block(problem.code_framework);
  if (p.text.size() > budget)
    throw PromptBudgetExceeded("initial prompt for '" + problem.slug + "' has " + std::to_string(p.text.size()) +
                               " characters, budget " + std::to_string(budget));
  return p;
}

Prompt build_fixing_prompt(const corpus::Problem& problem, std::string_view error_info, std::string_view faulty_code,
                           int attempt, int max_attempts, std::size_t budget) {
  check_problem(problem);
  if (attempt < 2 || attempt > max_attempts)
    throw InvalidArgument("fixing attempt " + std::to_string(attempt) + " outside 2.." + std::to_string(max_attempts));
  std::string error = chomp(defuse(error_info));
  std::string code = chomp(defuse_code(faulty_code));
  std::size_t overhead = assemble_fixing(problem, "", "").size();
  if (overhead > budget)
    throw PromptBudgetExceeded("fixing prompt for '" + problem.slug + "' exceeds the budget of " +
                               std::to_string(budget) + " characters");
  std::size_t room = budget - overhead;
  bool clipped = false;
  std::size_t code_share = std::min(code.size(), room - std::min(error.size(), room / 4));
  code = clip(std::move(code), code_share, clipped);
  error = clip(std::move(error), room - code.size(), clipped);

  Prompt p;
  p.kind = PromptKind::Fixing;
  p.attempt_index = attempt;
  p.truncated = clipped;
  p.text = assemble_fixing(problem, error, code);
  return p;
}

std::string extract_fenced_code(std::string_view reply) {
  std::string normalized = text::normalize_newlines(reply);
  auto blocks = corpus::extract_code_blocks(0, normalized, 1);
  const auto& detector = lang::LanguageDetector::default_instance();
  static const std::string subject = lang::ProfileTable::defaults().subject_language;
  for (auto it = blocks.snippets.rbegin(); it != blocks.snippets.rend(); ++it) {
    const auto& hint = it->fence_language_hint;
    if (!hint || hint->empty() || detector.resolve(*hint) == subject) return it->raw_text + "\n";
  }
  throw NoCodeFound("reply contains no python code block");
}

}  // namespace codebench::gen
