#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "codebench/corpus/model.hpp"

namespace codebench::corpus {

// ---- problems and posts --------------------------------------------------

struct EligibilityRules {
  // A problem whose categories all fall in this set cannot be solved in the
  // subject language and is dropped.
  std::set<std::string> non_subject_categories{"Database", "Shell"};
  bool drop_premium = true;
};

struct ImportStats {
  int total = 0;
  int premium = 0;
  int non_subject = 0;
  int retained = 0;
};

bool is_eligible(const Problem& p, const EligibilityRules& rules = {});

// Reads a problem dump (one JSON object per line) and returns the eligible
// problems in dump order. Throws MalformedDump naming the record index for
// unparseable or invalid records, DuplicateSlug when a slug repeats, IoError
// when the file cannot be read.
std::vector<Problem> import_problems(const std::filesystem::path& dump_path, const EligibilityRules& rules = {},
                                     ImportStats* stats = nullptr);

// Reads a post dump. Posts for slugs outside `known_slugs` are dropped and
// counted in `dropped`. Throws MalformedDump for bad records and repeated
// post ids.
std::vector<Post> import_posts(const std::filesystem::path& dump_path, const std::set<std::string>& known_slugs,
                               int* dropped = nullptr);

// Keeps posts with at least `min_upvotes` upvotes, in order. Throws
// InvalidArgument for a negative threshold.
std::vector<Post> filter_posts(const std::vector<Post>& posts, int min_upvotes = 2);

// ---- markdown --------------------------------------------------------------

struct Extraction {
  std::vector<Snippet> snippets;
  bool flagged = false;        // parity repair was applied
  int fences_consumed = 0;     // markers in the body plus synthesized ones
  int fences_synthesized = 0;  // closing markers added by the repair policy
};

// Splits a markdown body on triple-backtick fences. A fence line has at most
// three leading spaces, three or more backticks and an info string without
// backticks, so inline spans such as ```x``` never open a block. When a
// hinted fence appears inside an open block, the block is closed first; an
// unclosed block is closed at the end of the document. Both repairs flag the
// post. Leading and trailing blank lines of a block are dropped and only
// blocks of at least `min_lines` lines are kept.
Extraction extract_code_blocks(long long post_id, std::string_view body, int min_lines = 3);

std::vector<Snippet> extract_snippets(const Post& post, int min_lines = 3);

// ---- on-disk store ---------------------------------------------------------

// Layout under the root directory:
//   problems.jsonl                 problems without their test cases
//   testcases/<slug>/<n>.in|.out   test cases, n counting from 1
//   posts/<slug>.jsonl             posts grouped by problem
//   snippets.jsonl                 extracted snippets
//   manifest.json                  record counts and cutoff date
// Single writer; concurrent readers are safe once a write has returned.
class CorpusStore {
 public:
  explicit CorpusStore(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }

  void save_problems(const std::vector<Problem>& problems) const;
  std::vector<Problem> load_problems() const;

  void save_posts(const std::vector<Post>& posts) const;
  std::vector<Post> load_posts() const;  // ordered by slug, then file order
  std::vector<Post> load_posts(std::string_view slug) const;

  void save_snippets(const std::vector<Snippet>& snippets) const;
  std::vector<Snippet> load_snippets() const;

  void save_manifest(const CorpusManifest& manifest) const;
  CorpusManifest load_manifest() const;

  // Counts stored records. Flag counters are recomputed by extracting the
  // stored posts again.
  CorpusManifest recount(Date cutoff = Date{2023, 10, 1}) const;

 private:
  std::filesystem::path root_;
};

}  // namespace codebench::corpus
