#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace codebench::stats {

enum class Method { MannWhitneyU, WilcoxonSignedRank, SpearmanRho };
enum class Alternative { Less, Greater, TwoSided };

// Auto picks the exact distribution within the size bounds below.
enum class Computation { Auto, Exact, Approximate };

inline constexpr int kMannWhitneyExactMax = 12;  // n1 + n2
inline constexpr int kWilcoxonExactMax = 20;     // non-zero differences
inline constexpr int kSpearmanExactMax = 8;      // pairs

std::string to_string(Method m);
std::string to_string(Alternative a);
Alternative alternative_from_string(const std::string& s);

struct TestResult {
  double statistic = 0;
  double p_value = 1;
  Method method = Method::MannWhitneyU;
  Alternative alternative = Alternative::TwoSided;
  int n1 = 0;
  int n2 = 0;
  bool exact = false;
  bool degenerate = false;  // every observation tied; p is 1 by convention
};

void to_json(nlohmann::json& j, const TestResult& r);
void from_json(const nlohmann::json& j, TestResult& r);

// Average ranks starting at 1; tied values share the mean of their ranks.
std::vector<double> midranks(const std::vector<double>& values);

double normal_cdf(double z);

// U of sample `a` from midrank sums. Less tests whether `a` tends to be
// smaller. The exact path is the permutation distribution of U given the
// observed ties; the approximation is normal with tie and continuity
// corrections. Throws InvalidArgument for an empty sample or when Exact is
// forced beyond the size bound.
TestResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b,
                          Alternative alternative = Alternative::TwoSided, Computation how = Computation::Auto);

// W+ over the non-zero differences x - mu0 (zeros discarded). Greater tests
// whether the sample tends to exceed mu0. Throws AllZeroDifferences when
// every difference is zero.
TestResult wilcoxon_signed_rank(const std::vector<double>& sample, double mu0,
                                Alternative alternative = Alternative::TwoSided,
                                Computation how = Computation::Auto);

// Pearson correlation of midranks. The exact path enumerates every pairing
// of the y ranks; the two-sided exact p counts |rho| at least as extreme.
// The approximation uses Student's t with n - 2 degrees of freedom. Throws
// LengthMismatch, ConstantSequence, or InvalidArgument for fewer than three
// pairs.
TestResult spearman_rho(const std::vector<double>& x, const std::vector<double>& y,
                        Alternative alternative = Alternative::TwoSided, Computation how = Computation::Auto);

enum class EffectBand { Negligible, Small, Medium, Large };
std::string to_string(EffectBand b);
EffectBand effect_band(double d);  // |d| against 0.2, 0.5, 0.8

// (mean_a - mean_b) / pooled sd with (n - 1) weights. Throws InvalidArgument
// when a sample has fewer than two values, ZeroVariance when the pooled sd is 0.
double cohens_d(const std::vector<double>& a, const std::vector<double>& b);

// mean(x - mu0) / sd(x). Throws InvalidArgument for fewer than two values,
// ZeroVariance for a constant sample.
double cohens_d_one_sample(const std::vector<double>& x, double mu0);

}  // namespace codebench::stats
