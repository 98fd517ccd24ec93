#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "codebench/metrics/smells.hpp"

namespace codebench::metrics {

struct LineCounts {
  int sloc = 0;   // physical lines
  int ncloc = 0;  // Code-tagged lines

  bool operator==(const LineCounts&) const = default;
};

// Counts physical and code lines. Lines listed in `excluded` (1-based) are
// left out of ncloc, which is how inserted import lines are discounted.
LineCounts line_counts(std::string_view source, const std::set<int>& excluded = {});

// 1000 * count / ncloc. Throws ZeroLines when ncloc is 0.
double per_kloc(long long count, long long ncloc);

enum class Origin { Generated, User };

std::string_view to_string(Origin origin);
Origin origin_from_string(std::string_view s);

struct MetricRecord {
  std::string solution_id;
  std::string problem_slug;
  Origin origin = Origin::Generated;
  LineCounts lines;
  int smell_count = 0;
  int complexity_total = 0;
  std::optional<double> smells_per_kloc;      // absent when ncloc is 0
  std::optional<double> complexity_per_kloc;  // absent when ncloc is 0
  std::optional<double> runtime_rank;
  std::optional<double> memory_rank;
};

struct MeasureOptions {
  SmellConfig smells;
  std::set<int> excluded_lines;
};

// Parses `source` and fills every static field of a MetricRecord. Ranks are
// left empty. Propagates LexError.
MetricRecord measure(std::string solution_id, std::string problem_slug, Origin origin, std::string_view source,
                     const MeasureOptions& options = {});

void to_json(nlohmann::json& j, const MetricRecord& r);
void from_json(const nlohmann::json& j, MetricRecord& r);

}  // namespace codebench::metrics
