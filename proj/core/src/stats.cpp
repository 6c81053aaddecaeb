#include "aad/stats.hpp"

#include "aad/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

namespace aad::stats {
namespace {

// Continued fraction for I_x(a, b) (modified Lentz). Converges quickly for
// x < (a + 1)/(a + b + 2).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) return h;
  }
  return h;
}

double mean_of(const Group& g) {
  return std::accumulate(g.begin(), g.end(), 0.0) / static_cast<double>(g.size());
}

double sum_sq_dev(const Group& g, double mean) {
  double s = 0.0;
  for (const double v : g) s += (v - mean) * (v - mean);
  return s;
}

void check_groups(std::span<const Group> groups) {
  if (groups.size() < 2) throw InvalidInput("need at least two groups");
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (groups[i].size() < 2) {
      throw InvalidInput("group " + std::to_string(i) + " has fewer than two values");
    }
    for (const double v : groups[i]) {
      if (!std::isfinite(v)) throw InvalidInput("group " + std::to_string(i) + " has a non-finite value");
    }
  }
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw InvalidInput("incomplete_beta: a and b must be > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw InvalidInput("incomplete_beta: x must lie in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double f_upper_tail(double f, double d1, double d2) {
  if (!(d1 > 0.0) || !(d2 > 0.0)) throw InvalidInput("f_upper_tail: degrees of freedom must be > 0");
  if (std::isnan(f)) throw InvalidInput("f_upper_tail: F is NaN");
  if (f <= 0.0) return 1.0;
  if (std::isinf(f)) return 0.0;
  // P(F > f) = I_{d2/(d2 + d1 f)}(d2/2, d1/2)
  return incomplete_beta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f));
}

double t_two_sided(double t, double df) {
  if (!(df > 0.0)) throw InvalidInput("t_two_sided: degrees of freedom must be > 0");
  if (std::isnan(t)) throw InvalidInput("t_two_sided: t is NaN");
  if (std::isinf(t)) return 0.0;
  return incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

AnovaResult anova_oneway(std::span<const Group> groups) {
  check_groups(groups);
  std::size_t n_total = 0;
  double grand_sum = 0.0;
  for (const Group& g : groups) {
    n_total += g.size();
    grand_sum += std::accumulate(g.begin(), g.end(), 0.0);
  }
  const double grand_mean = grand_sum / static_cast<double>(n_total);

  double ss_between = 0.0;
  double ss_within = 0.0;
  for (const Group& g : groups) {
    const double m = mean_of(g);
    ss_between += static_cast<double>(g.size()) * (m - grand_mean) * (m - grand_mean);
    ss_within += sum_sq_dev(g, m);
  }

  AnovaResult result;
  result.df_between = static_cast<int>(groups.size()) - 1;
  result.df_within = static_cast<int>(n_total - groups.size());
  result.ms_between = ss_between / result.df_between;
  result.ms_within = ss_within / result.df_within;
  if (!(result.ms_within > 0.0)) {
    throw DegenerateVariance("anova: within-group variance is zero");
  }
  result.f_stat = result.ms_between / result.ms_within;
  result.p_value = f_upper_tail(result.f_stat, result.df_between, result.df_within);
  return result;
}

std::string format_anova(const AnovaResult& result) {
  char buf[128];
  if (result.p_value < 0.01) {
    std::snprintf(buf, sizeof(buf), "F(%d,%d)=%.2f, p<0.01", result.df_between, result.df_within,
                  result.f_stat);
  } else {
    std::snprintf(buf, sizeof(buf), "F(%d,%d)=%.2f, p=%.2f", result.df_between, result.df_within,
                  result.f_stat, result.p_value);
  }
  return buf;
}

std::vector<PairwiseResult> pairwise_bonferroni(std::span<const Group> groups,
                                                PairwiseVariance variance) {
  check_groups(groups);
  const std::size_t g = groups.size();
  const double m = static_cast<double>(g * (g - 1) / 2);

  double msw = 0.0;
  int df_within = 0;
  if (variance == PairwiseVariance::AnovaMsw) {
    const AnovaResult anova = anova_oneway(groups);
    msw = anova.ms_within;
    df_within = anova.df_within;
  }

  std::vector<PairwiseResult> out;
  for (std::size_t i = 0; i < g; ++i) {
    for (std::size_t j = i + 1; j < g; ++j) {
      const Group& a = groups[i];
      const Group& b = groups[j];
      const double na = static_cast<double>(a.size());
      const double nb = static_cast<double>(b.size());
      const double mean_a = mean_of(a);
      const double mean_b = mean_of(b);

      PairwiseResult r;
      r.group_a = i;
      r.group_b = j;
      double var = 0.0;
      if (variance == PairwiseVariance::Pooled) {
        r.df = na + nb - 2.0;
        var = (sum_sq_dev(a, mean_a) + sum_sq_dev(b, mean_b)) / r.df;
      } else {
        r.df = df_within;
        var = msw;
      }
      const double diff = mean_a - mean_b;
      const double se = std::sqrt(var * (1.0 / na + 1.0 / nb));
      if (se > 0.0) {
        r.t_stat = diff / se;
      } else {
        // Both groups constant: equal means are indistinguishable, unequal
        // means are separated without error.
        r.t_stat = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
      }
      r.p_raw = t_two_sided(r.t_stat, r.df);
      r.p_adjusted = std::min(1.0, m * r.p_raw);
      out.push_back(r);
    }
  }
  return out;
}

}  // namespace aad::stats
