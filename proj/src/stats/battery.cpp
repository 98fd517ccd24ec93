#include "codebench/stats/battery.hpp"

#include <map>

#include "codebench/common/errors.hpp"

namespace codebench::stats {

std::string to_string(Hypothesis h) {
  switch (h) {
    case Hypothesis::H1Quality: return "H1";
    case Hypothesis::H2Understandability: return "H2";
    case Hypothesis::H3Resources: return "H3";
    case Hypothesis::H4Time: return "H4";
  }
  return "?";
}

std::string description(Hypothesis h) {
  switch (h) {
    case Hypothesis::H1Quality: return "smells per kLOC, generated lower than user";
    case Hypothesis::H2Understandability: return "cognitive complexity per kLOC, generated lower than user";
    case Hypothesis::H3Resources: return "memory usage rank of generated solutions above the median";
    case Hypothesis::H4Time: return "runtime rank of generated solutions above the median";
  }
  return "?";
}

double bonferroni(double alpha, int hypotheses) {
  if (!(alpha > 0 && alpha < 1)) throw InvalidArgument("alpha must lie in (0, 1)");
  if (hypotheses < 1) throw InvalidArgument("family size must be positive");
  return alpha / hypotheses;
}

void to_json(nlohmann::json& j, const HypothesisOutcome& o) {
  j = {{"hypothesis", to_string(o.hypothesis)},
       {"description", description(o.hypothesis)},
       {"test", o.test},
       {"alpha_adjusted", o.alpha_adjusted},
       {"accepted", o.accepted}};
  if (o.effect_size_d) {
    j["effect_size_d"] = *o.effect_size_d;
    j["effect_band"] = to_string(effect_band(*o.effect_size_d));
  }
}

Hypothesis hypothesis_from_string(const std::string& s) {
  for (auto h : {Hypothesis::H1Quality, Hypothesis::H2Understandability, Hypothesis::H3Resources, Hypothesis::H4Time}) {
    if (to_string(h) == s) return h;
  }
  throw InvalidArgument("unknown hypothesis '" + s + "'");
}

void from_json(const nlohmann::json& j, HypothesisOutcome& o) {
  o.hypothesis = hypothesis_from_string(j.at("hypothesis").get<std::string>());
  o.test = j.at("test").get<TestResult>();
  o.alpha_adjusted = j.at("alpha_adjusted").get<double>();
  o.accepted = j.at("accepted").get<bool>();
  o.effect_size_d.reset();
  if (j.contains("effect_size_d")) o.effect_size_d = j["effect_size_d"].get<double>();
}

PairedSamples pair_by_problem(const std::vector<metrics::MetricRecord>& generated,
                              const std::vector<metrics::MetricRecord>& user, MetricField field) {
  auto group = [&](const std::vector<metrics::MetricRecord>& records) {
    std::map<std::string, std::pair<double, int>> acc;
    for (const auto& r : records) {
      const auto& v = r.*field;
      if (!v) continue;
      auto& [sum, n] = acc[r.problem_slug];
      sum += *v;
      ++n;
    }
    return acc;
  };
  auto g = group(generated);
  auto u = group(user);
  PairedSamples out;
  for (const auto& [slug, gs] : g) {
    auto it = u.find(slug);
    if (it == u.end()) continue;
    out.slugs.push_back(slug);
    out.generated.push_back(gs.first / gs.second);
    out.user.push_back(it->second.first / it->second.second);
  }
  return out;
}

namespace {

HypothesisOutcome decide(Hypothesis h, TestResult test, double alpha_adjusted) {
  HypothesisOutcome o;
  o.hypothesis = h;
  o.test = test;
  o.alpha_adjusted = alpha_adjusted;
  o.accepted = test.p_value < alpha_adjusted;
  return o;
}

}  // namespace

std::vector<HypothesisOutcome> run_battery(const std::vector<metrics::MetricRecord>& generated,
                                           const std::vector<metrics::MetricRecord>& user,
                                           const BatteryConfig& config) {
  if (generated.empty() || user.empty()) throw EmptyPopulation("run_battery: both record sets must be non-empty");
  double alpha_adj = bonferroni(config.alpha, config.hypotheses);
  Alternative lower = config.two_sided ? Alternative::TwoSided : Alternative::Less;
  Alternative higher = config.two_sided ? Alternative::TwoSided : Alternative::Greater;
  std::vector<HypothesisOutcome> out;

  const std::pair<Hypothesis, MetricField> pairwise[] = {
      {Hypothesis::H1Quality, &metrics::MetricRecord::smells_per_kloc},
      {Hypothesis::H2Understandability, &metrics::MetricRecord::complexity_per_kloc}};
  for (const auto& [h, field] : pairwise) {
    PairedSamples s = pair_by_problem(generated, user, field);
    if (s.slugs.empty()) throw EmptyIntersection("run_battery: no problem has both generated and user metrics");
    HypothesisOutcome o = decide(h, mann_whitney_u(s.generated, s.user, lower), alpha_adj);
    if (o.accepted) {
      try {
        o.effect_size_d = cohens_d(s.generated, s.user);
      } catch (const Error&) {
      }
    }
    out.push_back(std::move(o));
  }

  const std::pair<Hypothesis, MetricField> ranked[] = {{Hypothesis::H3Resources, &metrics::MetricRecord::memory_rank},
                                                       {Hypothesis::H4Time, &metrics::MetricRecord::runtime_rank}};
  for (const auto& [h, field] : ranked) {
    std::vector<double> ranks;
    for (const auto& r : generated) {
      if (r.*field) ranks.push_back(*(r.*field));
    }
    if (ranks.empty()) throw EmptyPopulation("run_battery: no generated record has a " + to_string(h) + " rank");
    TestResult test;
    try {
      test = wilcoxon_signed_rank(ranks, config.rank_null, higher);
    } catch (const AllZeroDifferences&) {
      test.method = Method::WilcoxonSignedRank;
      test.alternative = higher;
      test.n1 = static_cast<int>(ranks.size());
      test.statistic = 0;
      test.p_value = 1;
      test.degenerate = true;
    }
    HypothesisOutcome o = decide(h, test, alpha_adj);
    if (o.accepted) {
      try {
        o.effect_size_d = cohens_d_one_sample(ranks, config.rank_null);
      } catch (const Error&) {
      }
    }
    out.push_back(std::move(o));
  }
  return out;
}

}  // namespace codebench::stats
