#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace aad::stats {

// Regularized incomplete beta I_x(a, b), a, b > 0, x in [0, 1].
double incomplete_beta(double a, double b, double x);

// P(F > f) for F ~ F(d1, d2).
double f_upper_tail(double f, double d1, double d2);

// P(|T| > |t|) for T ~ Student t with df degrees of freedom.
double t_two_sided(double t, double df);

using Group = std::vector<double>;

struct AnovaResult {
  double f_stat = 0.0;
  int df_between = 0;
  int df_within = 0;
  double p_value = 1.0;
  double ms_between = 0.0;
  double ms_within = 0.0;
};

// Requires >= 2 groups of >= 2 values; throws DegenerateVariance when every
// group is constant.
AnovaResult anova_oneway(std::span<const Group> groups);

// "F(2,2547)=18.22, p<0.01"; p is printed to two decimals unless below 0.01.
std::string format_anova(const AnovaResult& result);

enum class PairwiseVariance {
  Pooled,     // each pair pools only its own two groups
  AnovaMsw,   // every pair uses the ANOVA within-group mean square
};

struct PairwiseResult {
  std::size_t group_a = 0;
  std::size_t group_b = 0;
  double t_stat = 0.0;
  double df = 0.0;
  double p_raw = 1.0;
  double p_adjusted = 1.0;  // min(1, m·p_raw), m = number of pairs
};

std::vector<PairwiseResult> pairwise_bonferroni(std::span<const Group> groups,
                                                PairwiseVariance variance = PairwiseVariance::Pooled);

}  // namespace aad::stats
