#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "codebench/corpus/model.hpp"

namespace codebench::lang {

// Language ids are the lower-case names used in the profile table.
inline constexpr std::string_view kUnknown = "unknown";

struct Rule {
  std::string pattern;
  bool regex = false;  // literal keyword otherwise
  double weight = 0;
};

struct LanguageProfile {
  std::string language;
  std::vector<std::string> aliases;  // names accepted in hints, tags and titles
  std::vector<Rule> rules;
};

struct ProfileTable {
  std::string subject_language;
  std::vector<LanguageProfile> languages;

  // Throws ConfigError for a missing or duplicated language, a non-positive
  // weight, an empty pattern or a regex that does not compile.
  static ProfileTable from_json(const nlohmann::json& j);
  static ProfileTable defaults();
};

enum class DetectionSource { FenceHint, Tag, Title, Lexical };

std::string to_string(DetectionSource s);

struct DetectionResult {
  std::string language;
  double score = 0;  // lexical score; 0 for the metadata sources
  DetectionSource source = DetectionSource::Lexical;
  double runner_up_score = 0;
};

// Counts non-overlapping, case-sensitive occurrences of `keyword`. An end of
// the keyword that is an identifier character must sit on a word boundary.
int count_keyword(std::string_view text, std::string_view keyword);

class LanguageDetector {
 public:
  explicit LanguageDetector(ProfileTable table);
  ~LanguageDetector();
  LanguageDetector(LanguageDetector&&) noexcept;
  LanguageDetector& operator=(LanguageDetector&&) noexcept;

  static const LanguageDetector& default_instance();

  const ProfileTable& table() const { return table_; }

  // Maps a hint, tag or title word to a language id, case-insensitively.
  std::optional<std::string> resolve(std::string_view name) const;

  // Languages named in a title, in order of first appearance. Title words
  // are split on anything other than letters, digits, '_', '+' and '#'.
  // Aliases of one or two characters only match a capitalized word, so
  // "go" in running prose is not read as a language.
  std::vector<std::string> languages_in_title(std::string_view title) const;

  // Weighted score of every profile: sum of weight times occurrence count.
  // Keyword rules run over the whole snippet, regex rules line by line.
  std::map<std::string, double> score_all(std::string_view code) const;

  // Fence hint, then tags (first tag, then a sole language among the tags),
  // then title, then the lexical argmax. A tied or zero maximum is Unknown.
  DetectionResult detect(const corpus::Snippet& snippet, const corpus::Post& post) const;
  DetectionResult detect_lexical(std::string_view code) const;

 private:
  struct Compiled;
  ProfileTable table_;
  std::unique_ptr<Compiled> compiled_;
};

}  // namespace codebench::lang
