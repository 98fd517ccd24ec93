#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "codebench/common/date.hpp"
#include "codebench/corpus/model.hpp"
#include "codebench/gen/loop.hpp"
#include "codebench/metrics/record.hpp"
#include "codebench/stats/battery.hpp"

namespace codebench::pipeline {

// 100 * part / whole rounded to two decimals; 0 when whole is 0.
double rate(long long part, long long whole);

// Counts per difficulty (Easy, Medium, Hard) with the row total.
struct DifficultyRow {
  std::string label;
  std::array<long long, 3> counts{};
  long long total = 0;
  std::array<double, 3> percent{};  // share of each difficulty in the row total
};

DifficultyRow make_row(std::string label, const std::array<long long, 3>& counts);

struct PartitionStats {
  std::string label;  // "before" or "after"
  std::array<long long, 3> problems{};
  long long total = 0;
  long long solved = 0;
  double solved_rate = 0;  // percent
};

struct Partition {
  PartitionStats before;
  PartitionStats after;
  PartitionStats overall;
};

// Splits on released_at < cutoff. `solved` lists the slugs with an accepted
// generated solution. Throws InvalidArgument when a solved slug names no
// problem.
Partition partition_by_cutoff(const std::vector<corpus::Problem>& problems, const std::vector<std::string>& solved,
                              const Date& cutoff);

struct Summary {
  long long n = 0;
  double mean = 0;
  double median = 0;
};

Summary summarize(std::vector<double> values);  // n = 0 gives zeros

struct AggregateRow {
  metrics::Origin origin = metrics::Origin::Generated;
  std::string difficulty;  // "Easy", "Medium", "Hard" or "Total"
  Summary smells_per_kloc;
  Summary complexity_per_kloc;
  Summary runtime_rank;
  Summary memory_rank;
};

// Mean and median per origin x difficulty, plus a Total row per origin.
// Records whose problem is unknown are ignored.
std::vector<AggregateRow> aggregate_metrics(const std::vector<metrics::MetricRecord>& records,
                                            const std::vector<corpus::Problem>& problems);

struct AcceptanceRow {
  std::string label;
  std::array<Summary, 3> by_difficulty{};
  Summary total;
};

struct MetricTableRow {
  std::string samples;  // "Generated" or "User"
  long long problems = 0;
  long long solutions = 0;
  long long count = 0;  // smells or complexity total
  long long loc = 0;
  double mean = 0;    // over per-problem means, per kLOC
  double median = 0;
};

struct RankTableRow {
  std::string scope;  // "All" or a difficulty
  long long problems = 0;
  double mean = 0;
  double median = 0;
};

struct SampleRow {
  std::string label;
  long long solutions = 0;
  long long valid = 0;
  long long sloc = 0;
  long long loc = 0;
};

struct CorrelationRow {
  std::string name;
  long long n = 0;
  std::optional<double> rho;
  std::optional<double> p_value;
  std::string note;  // reason when not computed
};

struct HypothesisRow {
  std::string hypothesis;
  std::string description;
  std::string test;
  std::optional<double> statistic;
  std::optional<double> p_value;
  std::optional<double> effect_size_d;
  double alpha_adjusted = 0;
  bool accepted = false;
  std::string note;
};

struct RetryPoint {
  int question_id = 0;
  std::string slug;
  int attempts = 0;
  bool accepted = false;
};

struct ReportBundle {
  std::vector<DifficultyRow> problem_overview;    // generated solved, user solved, total
  std::vector<AcceptanceRow> acceptance_rates;    // problem acceptance rate in percent
  std::vector<SampleRow> sample_counts;           // generated, user, total
  std::vector<DifficultyRow> solution_counts;     // valid solutions per difficulty
  Partition partition;
  std::vector<MetricTableRow> smells_table;
  std::vector<MetricTableRow> complexity_table;
  std::vector<RankTableRow> memory_rank_table;
  std::vector<RankTableRow> runtime_rank_table;
  std::vector<AggregateRow> metric_summary;
  std::vector<HypothesisRow> hypothesis_table;
  std::vector<CorrelationRow> correlations;
  std::vector<RetryPoint> retry_points;
  std::vector<long long> retry_histogram;  // [k - 1]: accepted after k attempts; last: never accepted
  std::vector<std::string> generation_failures;  // slugs where generation could not run
};

struct ReportInputs {
  std::vector<corpus::Problem> problems;
  std::vector<gen::GenerationOutcome> outcomes;
  std::vector<std::string> generation_failures;
  std::vector<metrics::MetricRecord> generated;  // accepted generated solutions
  std::vector<metrics::MetricRecord> user;       // accepted user solutions
  long long user_candidates = 0;                 // posts with at least one subject-language snippet
  std::vector<stats::HypothesisOutcome> hypotheses;
  std::string hypotheses_note;  // why the battery did not run, if it did not
  stats::BatteryConfig battery;
  Date cutoff{2023, 10, 1};
  int max_attempts = 5;
};

// Assembles every table and runs check_consistency on the result.
ReportBundle build_report(const ReportInputs& in);

// Throws InvalidArgument naming the first table whose totals or
// percentages do not recompute from its rows.
void check_consistency(const ReportBundle& bundle);

nlohmann::json to_json(const ReportBundle& bundle);

// One CSV per table, keyed by file name.
std::vector<std::pair<std::string, std::string>> to_csv(const ReportBundle& bundle);

}  // namespace codebench::pipeline
