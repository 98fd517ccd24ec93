#include "codebench/lang/detect.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <set>

#include "codebench/common/embedded_data.hpp"
#include "codebench/common/errors.hpp"
#include "codebench/common/text.hpp"

namespace codebench::lang {

std::string to_string(DetectionSource s) {
  switch (s) {
    case DetectionSource::FenceHint: return "FenceHint";
    case DetectionSource::Tag: return "Tag";
    case DetectionSource::Title: return "Title";
    case DetectionSource::Lexical: return "Lexical";
  }
  return "Lexical";
}

ProfileTable ProfileTable::from_json(const nlohmann::json& j) {
  ProfileTable t;
  try {
    t.subject_language = j.at("subject_language").get<std::string>();
    std::set<std::string> seen;
    for (const auto& lj : j.at("languages")) {
      LanguageProfile p;
      p.language = lj.at("language").get<std::string>();
      if (p.language.empty() || p.language == kUnknown) throw ConfigError("invalid language id '" + p.language + "'");
      if (!seen.insert(p.language).second) throw ConfigError("duplicate profile for '" + p.language + "'");
      if (lj.contains("aliases")) p.aliases = lj.at("aliases").get<std::vector<std::string>>();
      for (const auto& rj : lj.at("rules")) {
        Rule r;
        if (rj.contains("regex")) {
          r.regex = true;
          r.pattern = rj.at("regex").get<std::string>();
        } else {
          r.pattern = rj.at("keyword").get<std::string>();
        }
        r.weight = rj.at("weight").get<double>();
        if (r.pattern.empty()) throw ConfigError(p.language + ": empty pattern");
        if (!(r.weight > 0)) throw ConfigError(p.language + ": weight of '" + r.pattern + "' must be positive");
        if (r.regex) {
          try {
            std::regex probe(r.pattern);
          } catch (const std::regex_error& e) {
            throw ConfigError(p.language + ": bad regex '" + r.pattern + "': " + e.what());
          }
        }
        p.rules.push_back(std::move(r));
      }
      t.languages.push_back(std::move(p));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("language profiles: ") + e.what());
  }
  bool has_subject = std::any_of(t.languages.begin(), t.languages.end(),
                                 [&](const LanguageProfile& p) { return p.language == t.subject_language; });
  if (!has_subject) throw ConfigError("subject language '" + t.subject_language + "' has no profile");
  return t;
}

ProfileTable ProfileTable::defaults() { return from_json(nlohmann::json::parse(embedded::language_profiles_json())); }

int count_keyword(std::string_view text, std::string_view keyword) {
  if (keyword.empty()) return 0;
  bool check_front = text::is_ident_char(keyword.front());
  bool check_back = text::is_ident_char(keyword.back());
  int n = 0;
  std::size_t pos = 0;
  while ((pos = text.find(keyword, pos)) != std::string_view::npos) {
    std::size_t end = pos + keyword.size();
    bool ok = (!check_front || pos == 0 || !text::is_ident_char(text[pos - 1])) &&
              (!check_back || end == text.size() || !text::is_ident_char(text[end]));
    if (ok) {
      ++n;
      pos = end;
    } else {
      ++pos;
    }
  }
  return n;
}

struct LanguageDetector::Compiled {
  struct CompiledRule {
    const Rule* rule;
    std::regex re;
  };
  std::vector<std::vector<CompiledRule>> rules;  // parallel to table.languages
  std::map<std::string, std::string> aliases;    // lower-case alias -> id
};

LanguageDetector::LanguageDetector(ProfileTable table) : table_(std::move(table)), compiled_(std::make_unique<Compiled>()) {
  for (const auto& p : table_.languages) {
    std::vector<Compiled::CompiledRule> rules;
    for (const auto& r : p.rules) {
      rules.push_back({&r, r.regex ? std::regex(r.pattern) : std::regex()});
    }
    compiled_->rules.push_back(std::move(rules));
    compiled_->aliases.emplace(text::to_lower(p.language), p.language);
    for (const auto& a : p.aliases) {
      auto [it, inserted] = compiled_->aliases.emplace(text::to_lower(a), p.language);
      if (!inserted && it->second != p.language) throw ConfigError("alias '" + a + "' names two languages");
    }
  }
}

LanguageDetector::~LanguageDetector() = default;
LanguageDetector::LanguageDetector(LanguageDetector&&) noexcept = default;
LanguageDetector& LanguageDetector::operator=(LanguageDetector&&) noexcept = default;

const LanguageDetector& LanguageDetector::default_instance() {
  static const LanguageDetector instance(ProfileTable::defaults());
  return instance;
}

std::optional<std::string> LanguageDetector::resolve(std::string_view name) const {
  auto it = compiled_->aliases.find(text::to_lower(text::trim(name)));
  if (it == compiled_->aliases.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> LanguageDetector::languages_in_title(std::string_view title) const {
  auto word_char = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '+' || c == '#';
  };
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < title.size()) {
    if (!word_char(title[i])) {
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < title.size() && word_char(title[i])) ++i;
    std::string_view word = title.substr(start, i - start);
    std::size_t letters = std::count_if(word.begin(), word.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)); });
    if (letters <= 2 && !std::isupper(static_cast<unsigned char>(word.front()))) continue;
    auto lang = resolve(word);
    if (lang && std::find(out.begin(), out.end(), *lang) == out.end()) out.push_back(*lang);
  }
  return out;
}

std::map<std::string, double> LanguageDetector::score_all(std::string_view code) const {
  std::string norm = text::normalize_newlines(code);
  std::vector<std::string_view> lines = text::split_lines(norm);
  std::map<std::string, double> scores;
  for (std::size_t li = 0; li < table_.languages.size(); ++li) {
    double total = 0;
    for (const auto& cr : compiled_->rules[li]) {
      long long n = 0;
      if (!cr.rule->regex) {
        n = count_keyword(norm, cr.rule->pattern);
      } else {
        for (std::string_view line : lines) {
          auto begin = std::cregex_iterator(line.data(), line.data() + line.size(), cr.re);
          n += std::distance(begin, std::cregex_iterator());
        }
      }
      total += cr.rule->weight * static_cast<double>(n);
    }
    scores[table_.languages[li].language] = total;
  }
  return scores;
}

DetectionResult LanguageDetector::detect_lexical(std::string_view code) const {
  DetectionResult r;
  r.source = DetectionSource::Lexical;
  r.language = std::string(kUnknown);
  std::string best;
  double top = 0;
  double second = 0;
  for (const auto& [lang, score] : score_all(code)) {
    if (score > top) {
      second = top;
      top = score;
      best = lang;
    } else {
      second = std::max(second, score);
    }
  }
  r.score = top;
  r.runner_up_score = second;
  if (top > 0 && top > second) r.language = best;
  return r;
}

DetectionResult LanguageDetector::detect(const corpus::Snippet& snippet, const corpus::Post& post) const {
  auto meta = [](std::string lang, DetectionSource src) {
    DetectionResult r;
    r.language = std::move(lang);
    r.source = src;
    return r;
  };
  if (snippet.fence_language_hint) {
    if (auto lang = resolve(*snippet.fence_language_hint)) return meta(*lang, DetectionSource::FenceHint);
  }
  if (!post.tags.empty()) {
    if (auto lang = resolve(post.tags.front())) return meta(*lang, DetectionSource::Tag);
    std::set<std::string> named;
    for (const auto& tag : post.tags) {
      if (auto lang = resolve(tag)) named.insert(*lang);
    }
    if (named.size() == 1) return meta(*named.begin(), DetectionSource::Tag);
  }
  std::vector<std::string> in_title = languages_in_title(post.title);
  if (in_title.size() == 1) return meta(in_title.front(), DetectionSource::Title);
  return detect_lexical(snippet.raw_text);
}

}  // namespace codebench::lang
