#include "codebench/corpus/corpus.hpp"

#include <algorithm>
#include <map>
#include <optional>

#include "codebench/common/errors.hpp"
#include "codebench/common/jsonl.hpp"
#include "codebench/common/text.hpp"

namespace codebench::corpus {

namespace fs = std::filesystem;

bool is_eligible(const Problem& p, const EligibilityRules& rules) {
  if (rules.drop_premium && p.premium) return false;
  if (p.categories.empty()) return true;
  return !std::all_of(p.categories.begin(), p.categories.end(),
                      [&](const std::string& c) { return rules.non_subject_categories.count(c) > 0; });
}

namespace {

std::string record_error(const fs::path& path, std::size_t index, const std::string& what) {
  return path.string() + ": record " + std::to_string(index) + ": " + what;
}

template <typename T>
T decode(const nlohmann::json& j, const fs::path& path, std::size_t index) {
  try {
    T value = j.get<T>();
    validate(value);
    return value;
  } catch (const nlohmann::json::exception& e) {
    throw MalformedDump(record_error(path, index, e.what()));
  } catch (const InvalidArgument& e) {
    throw MalformedDump(record_error(path, index, e.what()));
  }
}

}  // namespace

std::vector<Problem> import_problems(const fs::path& dump_path, const EligibilityRules& rules, ImportStats* stats) {
  ImportStats local;
  std::vector<Problem> out;
  std::set<std::string> slugs;
  jsonl::for_each(dump_path, [&](const nlohmann::json& j, std::size_t index) {
    Problem p = decode<Problem>(j, dump_path, index);
    if (!slugs.insert(p.slug).second) throw DuplicateSlug("duplicate slug '" + p.slug + "'");
    ++local.total;
    if (rules.drop_premium && p.premium) {
      ++local.premium;
      return;
    }
    if (!is_eligible(p, rules)) {
      ++local.non_subject;
      return;
    }
    out.push_back(std::move(p));
  });
  local.retained = static_cast<int>(out.size());
  if (stats) *stats = local;
  return out;
}

std::vector<Post> import_posts(const fs::path& dump_path, const std::set<std::string>& known_slugs, int* dropped) {
  std::vector<Post> out;
  std::set<long long> ids;
  int skipped = 0;
  jsonl::for_each(dump_path, [&](const nlohmann::json& j, std::size_t index) {
    Post p = decode<Post>(j, dump_path, index);
    if (!ids.insert(p.post_id).second) {
      throw MalformedDump(record_error(dump_path, index, "duplicate post_id " + std::to_string(p.post_id)));
    }
    if (!known_slugs.count(p.problem_slug)) {
      ++skipped;
      return;
    }
    out.push_back(std::move(p));
  });
  if (dropped) *dropped = skipped;
  return out;
}

std::vector<Post> filter_posts(const std::vector<Post>& posts, int min_upvotes) {
  if (min_upvotes < 0) throw InvalidArgument("min_upvotes must be non-negative");
  std::vector<Post> out;
  std::copy_if(posts.begin(), posts.end(), std::back_inserter(out),
               [&](const Post& p) { return p.upvotes >= min_upvotes; });
  return out;
}

// ---- markdown -------------------------------------------------------------

namespace {

struct Fence {
  int indent = 0;
  std::optional<std::string> hint;
};

std::optional<Fence> parse_fence(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size() && i < 4 && line[i] == ' ') ++i;
  if (i > 3) return std::nullopt;
  std::size_t ticks = 0;
  while (i + ticks < line.size() && line[i + ticks] == '`') ++ticks;
  if (ticks < 3) return std::nullopt;
  std::string_view info = text::trim(line.substr(i + ticks));
  if (info.find('`') != std::string_view::npos) return std::nullopt;
  Fence f;
  f.indent = static_cast<int>(i);
  if (!info.empty()) {
    std::size_t end = info.find_first_of(" \t{");
    std::string_view word = info.substr(0, end);
    if (!word.empty()) f.hint = std::string(word);
  }
  return f;
}

std::string_view strip_indent(std::string_view line, int indent) {
  int n = 0;
  while (n < indent && static_cast<std::size_t>(n) < line.size() && line[static_cast<std::size_t>(n)] == ' ') ++n;
  return line.substr(static_cast<std::size_t>(n));
}

}  // namespace

Extraction extract_code_blocks(long long post_id, std::string_view body, int min_lines) {
  Extraction ex;
  std::string norm = text::normalize_newlines(body);
  bool in_block = false;
  Fence open;
  std::vector<std::string_view> content;

  auto close = [&] {
    in_block = false;
    std::size_t first = 0;
    std::size_t last = content.size();
    while (first < last && text::is_blank(content[first])) ++first;
    while (last > first && text::is_blank(content[last - 1])) --last;
    std::vector<std::string_view> kept(content.begin() + static_cast<std::ptrdiff_t>(first),
                                       content.begin() + static_cast<std::ptrdiff_t>(last));
    content.clear();
    if (static_cast<int>(kept.size()) < min_lines) return;
    Snippet s;
    s.post_id = post_id;
    s.ordinal = static_cast<int>(ex.snippets.size());
    s.raw_text = text::join(kept, "\n");
    s.fence_language_hint = open.hint;
    s.line_count = static_cast<int>(kept.size());
    ex.snippets.push_back(std::move(s));
  };

  for (std::string_view line : text::split_lines(norm)) {
    std::optional<Fence> f = parse_fence(line);
    if (!in_block) {
      if (f) {
        open = *f;
        in_block = true;
        ++ex.fences_consumed;
      }
      continue;
    }
    // Lines are de-indented by the opening fence's indent, so a marker that
    // only lines up after stripping still counts as a fence.
    std::string_view stripped = strip_indent(line, open.indent);
    if (!f) f = parse_fence(stripped);
    if (!f) {
      content.push_back(stripped);
      continue;
    }
    if (!f->hint) {
      ++ex.fences_consumed;
      close();
      continue;
    }
    // A hinted fence inside a block starts a new block.
    ++ex.fences_synthesized;
    ex.fences_consumed += 2;
    ex.flagged = true;
    close();
    open = *f;
    in_block = true;
  }
  if (in_block) {
    ++ex.fences_synthesized;
    ++ex.fences_consumed;
    ex.flagged = true;
    close();
  }
  return ex;
}

std::vector<Snippet> extract_snippets(const Post& post, int min_lines) {
  return extract_code_blocks(post.post_id, post.body, min_lines).snippets;
}

// ---- store ----------------------------------------------------------------

namespace {

std::vector<nlohmann::json> to_records(const auto& items) {
  std::vector<nlohmann::json> out;
  out.reserve(items.size());
  for (const auto& item : items) out.emplace_back(item);
  return out;
}

template <typename T>
std::vector<T> load_records(const fs::path& path) {
  std::vector<T> out;
  if (!fs::exists(path)) return out;
  jsonl::for_each(path, [&](const nlohmann::json& j, std::size_t index) {
    try {
      out.push_back(j.get<T>());
    } catch (const nlohmann::json::exception& e) {
      throw MalformedDump(record_error(path, index, e.what()));
    } catch (const InvalidArgument& e) {
      throw MalformedDump(record_error(path, index, e.what()));
    }
  });
  return out;
}

}  // namespace

CorpusStore::CorpusStore(fs::path root) : root_(std::move(root)) {}

void CorpusStore::save_problems(const std::vector<Problem>& problems) const {
  std::vector<nlohmann::json> records;
  fs::remove_all(root_ / "testcases");
  for (const auto& p : problems) {
    validate(p);
    nlohmann::json j = p;
    j.erase("test_cases");
    records.push_back(std::move(j));
    for (std::size_t i = 0; i < p.test_cases.size(); ++i) {
      fs::path base = root_ / "testcases" / p.slug / std::to_string(i + 1);
      jsonl::write_file(fs::path(base) += ".in", p.test_cases[i].input);
      jsonl::write_file(fs::path(base) += ".out", p.test_cases[i].expected);
    }
  }
  jsonl::write_all(root_ / "problems.jsonl", records);
}

std::vector<Problem> CorpusStore::load_problems() const {
  std::vector<Problem> problems = load_records<Problem>(root_ / "problems.jsonl");
  for (auto& p : problems) {
    fs::path dir = root_ / "testcases" / p.slug;
    for (int n = 1;; ++n) {
      fs::path base = dir / std::to_string(n);
      fs::path in = fs::path(base) += ".in";
      if (!fs::exists(in)) break;
      p.test_cases.push_back({jsonl::read_file(in), jsonl::read_file(fs::path(base) += ".out")});
    }
  }
  return problems;
}

void CorpusStore::save_posts(const std::vector<Post>& posts) const {
  std::map<std::string, std::vector<nlohmann::json>> by_slug;
  for (const auto& p : posts) {
    validate(p);
    by_slug[p.problem_slug].emplace_back(p);
  }
  fs::remove_all(root_ / "posts");
  fs::create_directories(root_ / "posts");
  for (const auto& [slug, records] : by_slug) jsonl::write_all(root_ / "posts" / (slug + ".jsonl"), records);
}

std::vector<Post> CorpusStore::load_posts() const {
  std::vector<Post> out;
  fs::path dir = root_ / "posts";
  if (!fs::exists(dir)) return out;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".jsonl") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    auto posts = load_records<Post>(f);
    out.insert(out.end(), posts.begin(), posts.end());
  }
  return out;
}

std::vector<Post> CorpusStore::load_posts(std::string_view slug) const {
  if (!is_valid_slug(slug)) throw InvalidArgument("invalid slug '" + std::string(slug) + "'");
  return load_records<Post>(root_ / "posts" / (std::string(slug) + ".jsonl"));
}

void CorpusStore::save_snippets(const std::vector<Snippet>& snippets) const {
  jsonl::write_all(root_ / "snippets.jsonl", to_records(snippets));
}

std::vector<Snippet> CorpusStore::load_snippets() const { return load_records<Snippet>(root_ / "snippets.jsonl"); }

void CorpusStore::save_manifest(const CorpusManifest& manifest) const {
  jsonl::write_file(root_ / "manifest.json", nlohmann::json(manifest).dump(2) + "\n");
}

CorpusManifest CorpusStore::load_manifest() const {
  fs::path path = root_ / "manifest.json";
  try {
    return nlohmann::json::parse(jsonl::read_file(path)).get<CorpusManifest>();
  } catch (const nlohmann::json::exception& e) {
    throw MalformedDump(path.string() + ": " + e.what());
  }
}

CorpusManifest CorpusStore::recount(Date cutoff) const {
  CorpusManifest m;
  m.cutoff_date = cutoff;
  m.problems = static_cast<int>(load_records<Problem>(root_ / "problems.jsonl").size());
  std::vector<Post> posts = load_posts();
  m.posts = static_cast<int>(posts.size());
  for (const auto& p : posts) {
    Extraction ex = extract_code_blocks(p.post_id, p.body);
    m.flagged_posts += ex.flagged;
    m.empty_posts += ex.snippets.empty();
  }
  m.snippets = static_cast<int>(load_snippets().size());
  return m;
}

}  // namespace codebench::corpus
