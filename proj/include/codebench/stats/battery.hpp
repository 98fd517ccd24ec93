#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "codebench/metrics/record.hpp"
#include "codebench/stats/tests.hpp"

namespace codebench::stats {

enum class Hypothesis { H1Quality, H2Understandability, H3Resources, H4Time };

std::string to_string(Hypothesis h);    // "H1" .. "H4"
std::string description(Hypothesis h);  // metric and direction in words

struct BatteryConfig {
  double alpha = 0.05;
  int hypotheses = 4;      // Bonferroni family size
  bool two_sided = false;  // overrides the directional alternatives
  double rank_null = 50;   // percentile rank under the null
};

double bonferroni(double alpha, int hypotheses);

struct HypothesisOutcome {
  Hypothesis hypothesis = Hypothesis::H1Quality;
  TestResult test;
  std::optional<double> effect_size_d;  // only for accepted hypotheses
  double alpha_adjusted = 0;
  bool accepted = false;
};

void to_json(nlohmann::json& j, const HypothesisOutcome& o);
void from_json(const nlohmann::json& j, HypothesisOutcome& o);
Hypothesis hypothesis_from_string(const std::string& s);  // throws InvalidArgument

// Generated values and per-problem user means over the problems both sides
// cover, ordered by slug. Generated values are averaged per problem as well.
struct PairedSamples {
  std::vector<std::string> slugs;
  std::vector<double> generated;
  std::vector<double> user;
};

using MetricField = std::optional<double> metrics::MetricRecord::*;

PairedSamples pair_by_problem(const std::vector<metrics::MetricRecord>& generated,
                              const std::vector<metrics::MetricRecord>& user, MetricField field);

// H1 smells per kLOC and H2 complexity per kLOC: Mann-Whitney U, generated
// less than user. H3 memory rank and H4 runtime rank: one-sample Wilcoxon of
// the generated ranks, greater than the null rank. Throws EmptyIntersection
// when no problem has both generated and user metrics, EmptyPopulation when
// either record set is empty or no generated record has a rank.
std::vector<HypothesisOutcome> run_battery(const std::vector<metrics::MetricRecord>& generated,
                                           const std::vector<metrics::MetricRecord>& user,
                                           const BatteryConfig& config = {});

}  // namespace codebench::stats
