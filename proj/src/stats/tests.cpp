#include "codebench/stats/tests.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "codebench/common/errors.hpp"

namespace codebench::stats {

std::string to_string(Method m) {
  switch (m) {
    case Method::MannWhitneyU: return "MannWhitneyU";
    case Method::WilcoxonSignedRank: return "WilcoxonSignedRank";
    case Method::SpearmanRho: return "SpearmanRho";
  }
  return "?";
}

std::string to_string(Alternative a) {
  switch (a) {
    case Alternative::Less: return "less";
    case Alternative::Greater: return "greater";
    case Alternative::TwoSided: return "two-sided";
  }
  return "?";
}

Alternative alternative_from_string(const std::string& s) {
  if (s == "less") return Alternative::Less;
  if (s == "greater") return Alternative::Greater;
  if (s == "two-sided") return Alternative::TwoSided;
  throw InvalidArgument("unknown alternative '" + s + "'");
}

namespace {

Method method_from_string(const std::string& s) {
  if (s == "MannWhitneyU") return Method::MannWhitneyU;
  if (s == "WilcoxonSignedRank") return Method::WilcoxonSignedRank;
  if (s == "SpearmanRho") return Method::SpearmanRho;
  throw InvalidArgument("unknown method '" + s + "'");
}

}  // namespace

void to_json(nlohmann::json& j, const TestResult& r) {
  j = {{"statistic", r.statistic}, {"p_value", r.p_value}, {"method", to_string(r.method)},
       {"alternative", to_string(r.alternative)}, {"n1", r.n1}, {"n2", r.n2}, {"exact", r.exact},
       {"degenerate", r.degenerate}};
}

void from_json(const nlohmann::json& j, TestResult& r) {
  r.statistic = j.at("statistic").get<double>();
  r.p_value = j.at("p_value").get<double>();
  r.method = method_from_string(j.at("method").get<std::string>());
  r.alternative = alternative_from_string(j.at("alternative").get<std::string>());
  r.n1 = j.at("n1").get<int>();
  r.n2 = j.at("n2").get<int>();
  r.exact = j.at("exact").get<bool>();
  r.degenerate = j.value("degenerate", false);
}

std::vector<double> midranks(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

namespace {

double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

// Sum over tie groups of t^3 - t.
double tie_term(const std::vector<double>& values) {
  std::vector<double> v = values;
  std::sort(v.begin(), v.end());
  double sum = 0;
  std::size_t i = 0;
  while (i < v.size()) {
    std::size_t j = i;
    while (j < v.size() && v[j] == v[i]) ++j;
    double t = static_cast<double>(j - i);
    sum += t * t * t - t;
    i = j;
  }
  return sum;
}

// One-sided tail probabilities from a discrete null distribution over
// doubled statistics. `counts[s]` is the number of arrangements giving 2x = s.
struct Tails {
  double less;
  double greater;
};

Tails tails(const std::vector<double>& counts, long long observed2) {
  double total = 0, le = 0, ge = 0;
  for (std::size_t s = 0; s < counts.size(); ++s) {
    total += counts[s];
    if (static_cast<long long>(s) <= observed2) le += counts[s];
    if (static_cast<long long>(s) >= observed2) ge += counts[s];
  }
  return {le / total, ge / total};
}

double combine(Tails t, Alternative alt) {
  switch (alt) {
    case Alternative::Less: return clamp01(t.less);
    case Alternative::Greater: return clamp01(t.greater);
    case Alternative::TwoSided: return clamp01(2.0 * std::min(t.less, t.greater));
  }
  return 1.0;
}

// Normal tail with continuity correction for a statistic with given mean
// and standard deviation.
double normal_p(double stat, double mean, double sd, Alternative alt) {
  switch (alt) {
    case Alternative::Less: return clamp01(normal_cdf((stat - mean + 0.5) / sd));
    case Alternative::Greater: return clamp01(1.0 - normal_cdf((stat - mean - 0.5) / sd));
    case Alternative::TwoSided: return clamp01(2.0 * (1.0 - normal_cdf((std::abs(stat - mean) - 0.5) / sd)));
  }
  return 1.0;
}

bool use_exact(Computation how, int size, int bound, const char* what) {
  if (how == Computation::Exact && size > bound) {
    throw InvalidArgument(std::string(what) + ": exact distribution limited to size " + std::to_string(bound));
  }
  return how == Computation::Exact || (how == Computation::Auto && size <= bound);
}

long long doubled(double rank) { return std::llround(rank * 2.0); }

}  // namespace

TestResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b, Alternative alternative,
                          Computation how) {
  if (a.empty() || b.empty()) throw InvalidArgument("mann_whitney_u: samples must be non-empty");
  TestResult r;
  r.method = Method::MannWhitneyU;
  r.alternative = alternative;
  r.n1 = static_cast<int>(a.size());
  r.n2 = static_cast<int>(b.size());
  int n = r.n1 + r.n2;
  r.exact = use_exact(how, n, kMannWhitneyExactMax, "mann_whitney_u");

  std::vector<double> pooled = a;
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::vector<double> ranks = midranks(pooled);
  double rank_sum = std::accumulate(ranks.begin(), ranks.begin() + r.n1, 0.0);
  double n1 = r.n1, n2 = r.n2;
  r.statistic = rank_sum - n1 * (n1 + 1) / 2.0;

  if (std::all_of(pooled.begin(), pooled.end(), [&](double v) { return v == pooled.front(); })) {
    r.degenerate = true;
    r.p_value = 1.0;
    return r;
  }

  if (r.exact) {
    // counts[k][s]: subsets of size k whose doubled rank sum is s.
    long long max_sum = 0;
    for (double rk : ranks) max_sum += doubled(rk);
    std::vector<std::vector<double>> counts(static_cast<std::size_t>(r.n1) + 1,
                                            std::vector<double>(static_cast<std::size_t>(max_sum) + 1, 0.0));
    counts[0][0] = 1;
    for (double rk : ranks) {
      long long w = doubled(rk);
      for (int k = r.n1; k >= 1; --k) {
        auto& row = counts[static_cast<std::size_t>(k)];
        const auto& prev = counts[static_cast<std::size_t>(k - 1)];
        for (long long s = max_sum; s >= w; --s) row[static_cast<std::size_t>(s)] += prev[static_cast<std::size_t>(s - w)];
      }
    }
    // Shift doubled rank sums to doubled U.
    long long offset = r.n1 * (r.n1 + 1);
    const auto& full = counts[static_cast<std::size_t>(r.n1)];
    std::vector<double> u_counts;
    for (long long s = offset; s <= max_sum; ++s) u_counts.push_back(full[static_cast<std::size_t>(s)]);
    r.p_value = combine(tails(u_counts, doubled(r.statistic)), alternative);
    return r;
  }

  double mean = n1 * n2 / 2.0;
  double var = n1 * n2 / 12.0 * ((n + 1) - tie_term(pooled) / (static_cast<double>(n) * (n - 1)));
  r.p_value = normal_p(r.statistic, mean, std::sqrt(var), alternative);
  return r;
}

TestResult wilcoxon_signed_rank(const std::vector<double>& sample, double mu0, Alternative alternative,
                                Computation how) {
  if (sample.empty()) throw InvalidArgument("wilcoxon_signed_rank: sample must be non-empty");
  std::vector<double> diffs;
  for (double x : sample) {
    if (x - mu0 != 0) diffs.push_back(x - mu0);
  }
  if (diffs.empty()) throw AllZeroDifferences("wilcoxon_signed_rank: every difference from mu0 is zero");
  TestResult r;
  r.method = Method::WilcoxonSignedRank;
  r.alternative = alternative;
  r.n1 = static_cast<int>(diffs.size());
  r.n2 = 0;
  int n = r.n1;
  r.exact = use_exact(how, n, kWilcoxonExactMax, "wilcoxon_signed_rank");

  std::vector<double> abs_d(diffs.size());
  std::transform(diffs.begin(), diffs.end(), abs_d.begin(), [](double d) { return std::abs(d); });
  std::vector<double> ranks = midranks(abs_d);
  double w_plus = 0;
  for (std::size_t i = 0; i < diffs.size(); ++i) {
    if (diffs[i] > 0) w_plus += ranks[i];
  }
  r.statistic = w_plus;

  if (r.exact) {
    long long max_sum = 0;
    for (double rk : ranks) max_sum += doubled(rk);
    std::vector<double> counts(static_cast<std::size_t>(max_sum) + 1, 0.0);
    counts[0] = 1;
    for (double rk : ranks) {
      long long w = doubled(rk);
      for (long long s = max_sum; s >= w; --s) counts[static_cast<std::size_t>(s)] += counts[static_cast<std::size_t>(s - w)];
    }
    r.p_value = combine(tails(counts, doubled(w_plus)), alternative);
    return r;
  }

  double nn = n;
  double mean = nn * (nn + 1) / 4.0;
  double var = nn * (nn + 1) * (2 * nn + 1) / 24.0 - tie_term(abs_d) / 48.0;
  r.p_value = normal_p(w_plus, mean, std::sqrt(var), alternative);
  return r;
}

namespace {

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  double n = static_cast<double>(x.size());
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

bool constant(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

}  // namespace

TestResult spearman_rho(const std::vector<double>& x, const std::vector<double>& y, Alternative alternative,
                        Computation how) {
  if (x.size() != y.size()) throw LengthMismatch("spearman_rho: sequences differ in length");
  if (x.size() < 3) throw InvalidArgument("spearman_rho: need at least three pairs");
  if (constant(x) || constant(y)) throw ConstantSequence("spearman_rho: a sequence is constant");
  TestResult r;
  r.method = Method::SpearmanRho;
  r.alternative = alternative;
  r.n1 = static_cast<int>(x.size());
  r.n2 = r.n1;
  r.exact = use_exact(how, r.n1, kSpearmanExactMax, "spearman_rho");

  std::vector<double> rx = midranks(x);
  std::vector<double> ry = midranks(y);
  double rho = std::clamp(pearson(rx, ry), -1.0, 1.0);
  r.statistic = rho;

  if (r.exact) {
    constexpr double kEps = 1e-12;
    std::vector<double> perm = ry;
    std::sort(perm.begin(), perm.end());
    double total = 0, le = 0, ge = 0, abs_ge = 0;
    do {
      double v = pearson(rx, perm);
      total += 1;
      le += v <= rho + kEps;
      ge += v >= rho - kEps;
      abs_ge += std::abs(v) >= std::abs(rho) - kEps;
    } while (std::next_permutation(perm.begin(), perm.end()));
    switch (alternative) {
      case Alternative::Less: r.p_value = le / total; break;
      case Alternative::Greater: r.p_value = ge / total; break;
      case Alternative::TwoSided: r.p_value = abs_ge / total; break;
    }
    r.p_value = clamp01(r.p_value);
    return r;
  }

  double df = r.n1 - 2;
  if (std::abs(rho) >= 1.0) {
    double lower = rho > 0 ? 1.0 : 0.0;  // P(T <= t) at t = +/- infinity
    switch (alternative) {
      case Alternative::Less: r.p_value = lower; break;
      case Alternative::Greater: r.p_value = 1.0 - lower; break;
      case Alternative::TwoSided: r.p_value = 0.0; break;
    }
    return r;
  }
  double t = rho * std::sqrt(df / (1.0 - rho * rho));
  boost::math::students_t dist(df);
  double cdf = boost::math::cdf(dist, t);
  switch (alternative) {
    case Alternative::Less: r.p_value = cdf; break;
    case Alternative::Greater: r.p_value = boost::math::cdf(boost::math::complement(dist, t)); break;
    case Alternative::TwoSided:
      r.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
      break;
  }
  r.p_value = clamp01(r.p_value);
  return r;
}

std::string to_string(EffectBand b) {
  switch (b) {
    case EffectBand::Negligible: return "negligible";
    case EffectBand::Small: return "small";
    case EffectBand::Medium: return "medium";
    case EffectBand::Large: return "large";
  }
  return "?";
}

EffectBand effect_band(double d) {
  double m = std::abs(d);
  if (m >= 0.8) return EffectBand::Large;
  if (m >= 0.5) return EffectBand::Medium;
  if (m >= 0.2) return EffectBand::Small;
  return EffectBand::Negligible;
}

namespace {

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

double sum_sq_dev(const std::vector<double>& v, double mean) {
  double s = 0;
  for (double x : v) s += (x - mean) * (x - mean);
  return s;
}

}  // namespace

double cohens_d(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() < 2 || b.size() < 2) throw InvalidArgument("cohens_d: each sample needs at least two values");
  double ma = mean_of(a), mb = mean_of(b);
  double pooled = (sum_sq_dev(a, ma) + sum_sq_dev(b, mb)) / static_cast<double>(a.size() + b.size() - 2);
  if (!(pooled > 0)) throw ZeroVariance("cohens_d: pooled variance is zero");
  return (ma - mb) / std::sqrt(pooled);
}

double cohens_d_one_sample(const std::vector<double>& x, double mu0) {
  if (x.size() < 2) throw InvalidArgument("cohens_d_one_sample: need at least two values");
  double m = mean_of(x);
  double var = sum_sq_dev(x, m) / static_cast<double>(x.size() - 1);
  if (!(var > 0)) throw ZeroVariance("cohens_d_one_sample: sample variance is zero");
  return (m - mu0) / std::sqrt(var);
}

}  // namespace codebench::stats
