#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "codebench/common/date.hpp"

namespace codebench::corpus {

enum class Difficulty { Easy, Medium, Hard };

std::string_view to_string(Difficulty d);
Difficulty difficulty_from_string(std::string_view s);  // throws InvalidArgument

struct TestCase {
  std::string input;
  std::string expected;

  bool operator==(const TestCase&) const = default;
};

struct Problem {
  std::string slug;
  int question_id = 0;
  std::string title;
  Difficulty difficulty = Difficulty::Easy;
  double acceptance_rate = 0.0;  // fraction in [0, 1]
  std::set<std::string> categories;
  std::string description;
  std::string code_framework;
  std::vector<TestCase> test_cases;
  Date released_at;
  bool premium = false;

  bool operator==(const Problem&) const = default;
};

struct Post {
  long long post_id = 0;
  std::string problem_slug;
  std::string title;
  std::vector<std::string> tags;
  int upvotes = 0;
  Date created_at;
  std::string author;
  std::string body;

  bool operator==(const Post&) const = default;
};

struct Snippet {
  long long post_id = 0;
  int ordinal = 0;
  std::string raw_text;  // no trailing newline
  std::optional<std::string> fence_language_hint;
  int line_count = 0;

  bool operator==(const Snippet&) const = default;
};

struct CorpusManifest {
  int problems = 0;
  int posts = 0;
  int snippets = 0;
  int flagged_posts = 0;  // posts whose markdown needed repair
  int empty_posts = 0;    // posts that yielded no snippet
  Date cutoff_date{2023, 10, 1};

  bool operator==(const CorpusManifest&) const = default;
};

// Record validation. Throw InvalidArgument describing the first violated
// invariant.
void validate(const Problem& p);
void validate(const Post& p);

// Slugs name files on disk, so only [A-Za-z0-9_-] is accepted.
bool is_valid_slug(std::string_view slug);

// JSON field names match the struct fields; dates are ISO strings, optional
// values are omitted when absent. `from_json` throws nlohmann exceptions or
// InvalidArgument on bad input.
void to_json(nlohmann::json& j, const TestCase& t);
void from_json(const nlohmann::json& j, TestCase& t);
void to_json(nlohmann::json& j, const Problem& p);
void from_json(const nlohmann::json& j, Problem& p);
void to_json(nlohmann::json& j, const Post& p);
void from_json(const nlohmann::json& j, Post& p);
void to_json(nlohmann::json& j, const Snippet& s);
void from_json(const nlohmann::json& j, Snippet& s);
void to_json(nlohmann::json& j, const CorpusManifest& m);
void from_json(const nlohmann::json& j, CorpusManifest& m);

}  // namespace codebench::corpus
