#include "codebench/corpus/model.hpp"

#include "codebench/common/errors.hpp"
#include "codebench/common/text.hpp"

namespace codebench::corpus {

std::string_view to_string(Difficulty d) {
  switch (d) {
    case Difficulty::Easy: return "Easy";
    case Difficulty::Medium: return "Medium";
    case Difficulty::Hard: return "Hard";
  }
  return "?";
}

Difficulty difficulty_from_string(std::string_view s) {
  std::string lower = text::to_lower(s);
  if (lower == "easy") return Difficulty::Easy;
  if (lower == "medium") return Difficulty::Medium;
  if (lower == "hard") return Difficulty::Hard;
  throw InvalidArgument("unknown difficulty '" + std::string(s) + "'");
}

bool is_valid_slug(std::string_view slug) {
  if (slug.empty()) return false;
  for (char c : slug) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
    if (!ok) return false;
  }
  return slug != "-" && slug.front() != '.';
}

void validate(const Problem& p) {
  if (!is_valid_slug(p.slug)) throw InvalidArgument("invalid slug '" + p.slug + "'");
  if (p.question_id <= 0) throw InvalidArgument("question_id must be positive");
  if (!(p.acceptance_rate >= 0.0 && p.acceptance_rate <= 1.0)) {
    throw InvalidArgument("acceptance_rate must lie in [0, 1]");
  }
}

void validate(const Post& p) {
  if (p.post_id <= 0) throw InvalidArgument("post_id must be positive");
  if (p.upvotes < 0) throw InvalidArgument("upvotes must be non-negative");
  if (!is_valid_slug(p.problem_slug)) throw InvalidArgument("invalid problem_slug '" + p.problem_slug + "'");
}

void to_json(nlohmann::json& j, const TestCase& t) { j = {{"input", t.input}, {"expected", t.expected}}; }

void from_json(const nlohmann::json& j, TestCase& t) {
  t.input = j.at("input").get<std::string>();
  t.expected = j.at("expected").get<std::string>();
}

void to_json(nlohmann::json& j, const Problem& p) {
  j = nlohmann::json{{"slug", p.slug},
                     {"question_id", p.question_id},
                     {"title", p.title},
                     {"difficulty", to_string(p.difficulty)},
                     {"acceptance_rate", p.acceptance_rate},
                     {"categories", p.categories},
                     {"description", p.description},
                     {"code_framework", p.code_framework},
                     {"test_cases", p.test_cases},
                     {"released_at", p.released_at.to_string()},
                     {"premium", p.premium}};
}

void from_json(const nlohmann::json& j, Problem& p) {
  p.slug = j.at("slug").get<std::string>();
  p.question_id = j.at("question_id").get<int>();
  p.title = j.value("title", std::string());
  p.difficulty = difficulty_from_string(j.at("difficulty").get<std::string>());
  p.acceptance_rate = j.value("acceptance_rate", 0.0);
  p.categories = j.value("categories", std::set<std::string>());
  p.description = j.value("description", std::string());
  p.code_framework = j.value("code_framework", std::string());
  p.test_cases = j.value("test_cases", std::vector<TestCase>());
  p.released_at = Date::parse(j.at("released_at").get<std::string>());
  p.premium = j.value("premium", false);
}

void to_json(nlohmann::json& j, const Post& p) {
  j = nlohmann::json{{"post_id", p.post_id}, {"problem_slug", p.problem_slug},
                     {"title", p.title},     {"tags", p.tags},
                     {"upvotes", p.upvotes}, {"created_at", p.created_at.to_string()},
                     {"author", p.author},   {"body", p.body}};
}

void from_json(const nlohmann::json& j, Post& p) {
  p.post_id = j.at("post_id").get<long long>();
  p.problem_slug = j.at("problem_slug").get<std::string>();
  p.title = j.value("title", std::string());
  p.tags = j.value("tags", std::vector<std::string>());
  p.upvotes = j.value("upvotes", 0);
  p.created_at = Date::parse(j.at("created_at").get<std::string>());
  p.author = j.value("author", std::string());
  p.body = j.value("body", std::string());
}

void to_json(nlohmann::json& j, const Snippet& s) {
  j = nlohmann::json{
      {"post_id", s.post_id}, {"ordinal", s.ordinal}, {"raw_text", s.raw_text}, {"line_count", s.line_count}};
  if (s.fence_language_hint) j["fence_language_hint"] = *s.fence_language_hint;
}

void from_json(const nlohmann::json& j, Snippet& s) {
  s.post_id = j.at("post_id").get<long long>();
  s.ordinal = j.at("ordinal").get<int>();
  s.raw_text = j.at("raw_text").get<std::string>();
  s.line_count = j.at("line_count").get<int>();
  if (j.contains("fence_language_hint") && !j["fence_language_hint"].is_null()) {
    s.fence_language_hint = j["fence_language_hint"].get<std::string>();
  } else {
    s.fence_language_hint.reset();
  }
}

void to_json(nlohmann::json& j, const CorpusManifest& m) {
  j = nlohmann::json{{"problems", m.problems},         {"posts", m.posts},
                     {"snippets", m.snippets},         {"flagged_posts", m.flagged_posts},
                     {"empty_posts", m.empty_posts},   {"cutoff_date", m.cutoff_date.to_string()}};
}

void from_json(const nlohmann::json& j, CorpusManifest& m) {
  m.problems = j.at("problems").get<int>();
  m.posts = j.at("posts").get<int>();
  m.snippets = j.at("snippets").get<int>();
  m.flagged_posts = j.value("flagged_posts", 0);
  m.empty_posts = j.value("empty_posts", 0);
  m.cutoff_date = Date::parse(j.value("cutoff_date", std::string("2023-10-01")));
}

}  // namespace codebench::corpus
