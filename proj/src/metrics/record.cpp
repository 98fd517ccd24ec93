#include "codebench/metrics/record.hpp"

#include "codebench/common/errors.hpp"
#include "codebench/metrics/complexity.hpp"
#include "codebench/pysyntax/lines.hpp"

namespace codebench::metrics {

LineCounts line_counts(std::string_view source, const std::set<int>& excluded) {
  LineCounts c;
  auto tags = pysyntax::classify_lines(source);
  c.sloc = static_cast<int>(tags.size());
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (tags[i] == pysyntax::LineClass::Code && !excluded.count(static_cast<int>(i) + 1)) ++c.ncloc;
  }
  return c;
}

double per_kloc(long long count, long long ncloc) {
  if (ncloc <= 0) throw ZeroLines("per-kLOC normalization needs at least one code line");
  if (count < 0) throw InvalidArgument("count must be non-negative");
  return 1000.0 * static_cast<double>(count) / static_cast<double>(ncloc);
}

std::string_view to_string(Origin origin) { return origin == Origin::Generated ? "generated" : "user"; }

Origin origin_from_string(std::string_view s) {
  if (s == "generated") return Origin::Generated;
  if (s == "user") return Origin::User;
  throw InvalidArgument("unknown origin '" + std::string(s) + "'");
}

MetricRecord measure(std::string solution_id, std::string problem_slug, Origin origin, std::string_view source,
                     const MeasureOptions& options) {
  MetricRecord r;
  r.solution_id = std::move(solution_id);
  r.problem_slug = std::move(problem_slug);
  r.origin = origin;
  pysyntax::StructureTree tree = pysyntax::parse_source(source);
  r.lines = line_counts(source, options.excluded_lines);
  r.smell_count = count_smells(tree, source, options.smells).count;
  r.complexity_total = cognitive_complexity(tree).total;
  if (r.lines.ncloc > 0) {
    r.smells_per_kloc = per_kloc(r.smell_count, r.lines.ncloc);
    r.complexity_per_kloc = per_kloc(r.complexity_total, r.lines.ncloc);
  }
  return r;
}

namespace {

void put_optional(nlohmann::json& j, const char* key, const std::optional<double>& v) {
  if (v) j[key] = *v;
}

std::optional<double> get_optional(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<double>();
}

}  // namespace

void to_json(nlohmann::json& j, const MetricRecord& r) {
  j = nlohmann::json{{"solution_id", r.solution_id},
                     {"problem_slug", r.problem_slug},
                     {"origin", to_string(r.origin)},
                     {"sloc", r.lines.sloc},
                     {"ncloc", r.lines.ncloc},
                     {"smell_count", r.smell_count},
                     {"complexity_total", r.complexity_total}};
  put_optional(j, "smells_per_kloc", r.smells_per_kloc);
  put_optional(j, "complexity_per_kloc", r.complexity_per_kloc);
  put_optional(j, "runtime_rank", r.runtime_rank);
  put_optional(j, "memory_rank", r.memory_rank);
}

void from_json(const nlohmann::json& j, MetricRecord& r) {
  r.solution_id = j.at("solution_id").get<std::string>();
  r.problem_slug = j.at("problem_slug").get<std::string>();
  r.origin = origin_from_string(j.at("origin").get<std::string>());
  r.lines.sloc = j.at("sloc").get<int>();
  r.lines.ncloc = j.at("ncloc").get<int>();
  r.smell_count = j.at("smell_count").get<int>();
  r.complexity_total = j.at("complexity_total").get<int>();
  r.smells_per_kloc = get_optional(j, "smells_per_kloc");
  r.complexity_per_kloc = get_optional(j, "complexity_per_kloc");
  r.runtime_rank = get_optional(j, "runtime_rank");
  r.memory_rank = get_optional(j, "memory_rank");
}

}  // namespace codebench::metrics
