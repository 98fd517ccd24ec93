#pragma once

#include <algorithm>
#include <cmath>
#include <array>
#include <functional>
#include <random>
#include <vector>

#include "codebench/stats/tests.hpp"

// Full-enumeration reference implementations. They share nothing with the
// library beyond the Alternative enum: ranks come from pairwise counting, U
// from pair comparisons, and the null distributions from listing every
// assignment, sign pattern or permutation.
namespace oracle {

using codebench::stats::Alternative;

inline std::vector<double> naive_ranks(const std::vector<double>& v) {
  std::vector<double> out;
  for (double x : v) {
    double less = 0, equal = 0;
    for (double y : v) {
      less += y < x;
      equal += y == x;
    }
    out.push_back(1 + less + (equal - 1) / 2);
  }
  return out;
}

struct Tally {
  double total = 0, le = 0, ge = 0;
  void add(double value, double observed) {
    total += 1;
    le += value <= observed + 1e-9;
    ge += value >= observed - 1e-9;
  }
  double p(Alternative alt) const {
    double l = le / total, g = ge / total;
    if (alt == Alternative::Less) return l;
    if (alt == Alternative::Greater) return g;
    return std::min(1.0, 2 * std::min(l, g));
  }
};

inline double u_statistic(const std::vector<double>& a, const std::vector<double>& b) {
  double u = 0;
  for (double x : a) {
    for (double y : b) u += x > y ? 1.0 : x == y ? 0.5 : 0.0;
  }
  return u;
}

// Every way of choosing which pooled observations form the first sample.
inline double mann_whitney_p(const std::vector<double>& a, const std::vector<double>& b, Alternative alt) {
  std::vector<double> pooled = a;
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::size_t n = pooled.size();
  double observed = u_statistic(a, b);
  Tally t;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != a.size()) continue;
    std::vector<double> x, y;
    for (std::size_t i = 0; i < n; ++i) ((mask >> i) & 1u ? x : y).push_back(pooled[i]);
    t.add(u_statistic(x, y), observed);
  }
  return t.p(alt);
}

inline double w_plus(const std::vector<double>& d) {
  std::vector<double> mag;
  for (double x : d) mag.push_back(std::abs(x));
  std::vector<double> r = naive_ranks(mag);
  double w = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] > 0) w += r[i];
  }
  return w;
}

// Every sign pattern over the non-zero differences.
inline double wilcoxon_p(const std::vector<double>& sample, double mu0, Alternative alt) {
  std::vector<double> d;
  for (double x : sample) {
    if (x != mu0) d.push_back(x - mu0);
  }
  double observed = w_plus(d);
  Tally t;
  for (unsigned mask = 0; mask < (1u << d.size()); ++mask) {
    std::vector<double> flipped;
    for (std::size_t i = 0; i < d.size(); ++i) flipped.push_back((mask >> i) & 1u ? std::abs(d[i]) : -std::abs(d[i]));
    t.add(w_plus(flipped), observed);
  }
  return t.p(alt);
}

inline double rho(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> rx = naive_ranks(x), ry = naive_ranks(y);
  double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += rx[i] / n;
    my += ry[i] / n;
  }
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

// Every permutation of y's positions, generated recursively.
inline double spearman_p(const std::vector<double>& x, const std::vector<double>& y, Alternative alt) {
  double observed = rho(x, y);
  Tally t;
  double abs_ge = 0;
  std::vector<double> perm;
  std::vector<bool> used(y.size(), false);
  std::function<void()> rec = [&] {
    if (perm.size() == y.size()) {
      double r = rho(x, perm);
      t.add(r, observed);
      abs_ge += std::abs(r) >= std::abs(observed) - 1e-9;
      return;
    }
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (used[i]) continue;
      used[i] = true;
      perm.push_back(y[i]);
      rec();
      perm.pop_back();
      used[i] = false;
    }
  };
  rec();
  if (alt == Alternative::TwoSided) return abs_ge / t.total;
  return t.p(alt);
}

}  // namespace oracle

namespace oracle {

inline constexpr std::size_t kMannWhitneySplits = codebench::stats::kMannWhitneyExactMax;

struct CrossoverGaps {
  // Mann-Whitney worst gaps indexed by n1, one-sided and two-sided.
  std::array<double, kMannWhitneySplits> mw_one_sided{};
  std::array<double, kMannWhitneySplits> mw_two_sided{};
  double wilcoxon = 0;
  double spearman = 0;

  double mann_whitney(std::size_t lo = 1, std::size_t hi = kMannWhitneySplits - 1) const {
    double w = 0;
    for (std::size_t n1 = lo; n1 <= hi; ++n1) w = std::max({w, mw_one_sided[n1], mw_two_sided[n1]});
    return w;
  }
  double mann_whitney_one_sided(std::size_t lo, std::size_t hi) const {
    double w = 0;
    for (std::size_t n1 = lo; n1 <= hi; ++n1) w = std::max(w, mw_one_sided[n1]);
    return w;
  }
};

// Largest |exact p - approximate p| over seeded random instances at the
// largest sizes that still use the exact path. Draws are continuous, the
// split n1 is uniform over 1..11 and every alternative is evaluated.
inline CrossoverGaps crossover_gaps(int instances, unsigned seed) {
  using namespace codebench::stats;
  std::mt19937 rng(seed);
  std::normal_distribution<double> z(0, 1);
  constexpr Alternative alts[] = {Alternative::Less, Alternative::Greater, Alternative::TwoSided};
  CrossoverGaps g;
  auto gap = [](const TestResult& e, const TestResult& a) { return std::abs(e.p_value - a.p_value); };
  for (int i = 0; i < instances; ++i) {
    double shift = 0.5 * static_cast<double>(i % 4);
    std::size_t n1 = 1 + rng() % (kMannWhitneySplits - 1);
    std::size_t n2 = static_cast<std::size_t>(kMannWhitneyExactMax) - n1;
    std::vector<double> a, b, s, x, y;
    for (std::size_t k = 0; k < n1; ++k) a.push_back(z(rng));
    for (std::size_t k = 0; k < n2; ++k) b.push_back(z(rng) + shift);
    for (int k = 0; k < kWilcoxonExactMax; ++k) s.push_back(z(rng) + shift / 2);
    for (int k = 0; k < kSpearmanExactMax; ++k) {
      x.push_back(z(rng));
      y.push_back(z(rng) + shift * x.back());
    }
    for (auto alt : alts) {
      double mw = gap(mann_whitney_u(a, b, alt, Computation::Exact), mann_whitney_u(a, b, alt, Computation::Approximate));
      auto& slot = alt == Alternative::TwoSided ? g.mw_two_sided[n1] : g.mw_one_sided[n1];
      slot = std::max(slot, mw);
      g.wilcoxon = std::max(g.wilcoxon, gap(wilcoxon_signed_rank(s, 0, alt, Computation::Exact),
                                            wilcoxon_signed_rank(s, 0, alt, Computation::Approximate)));
      g.spearman = std::max(g.spearman, gap(spearman_rho(x, y, alt, Computation::Exact),
                                            spearman_rho(x, y, alt, Computation::Approximate)));
    }
  }
  return g;
}

}  // namespace oracle
