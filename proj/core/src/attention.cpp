#include "aad/attention.hpp"

#include "aad/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace aad {

void CocktailTrial::validate() const {
  recording.validate();
  if (true_target >= kStreamCount) throw InvalidInput("true target index out of range");
  for (std::size_t i = 0; i < kStreamCount; ++i) {
    if (static_cast<Eigen::Index>(candidates[i].size()) != recording.samples()) {
      throw DimensionMismatch("candidate " + std::to_string(i) + " has " +
                              std::to_string(candidates[i].size()) + " samples, recording " +
                              std::to_string(recording.samples()));
    }
  }
}

AttentionResult classify_correlations(const std::array<double, kStreamCount>& r_values,
                                      std::size_t true_target) {
  AttentionResult result;
  result.r_values = r_values;
  result.true_target = true_target;
  const auto best = std::max_element(r_values.begin(), r_values.end());
  result.detected = static_cast<std::size_t>(best - r_values.begin());
  result.tie = std::count(r_values.begin(), r_values.end(), *best) > 1;
  result.correct = !result.tie && result.detected == true_target;
  return result;
}

AttentionResult detect_attention(const Decoder& decoder, const CocktailTrial& trial) {
  trial.validate();
  const Envelope estimate = reconstruct(decoder, trial.recording);
  std::array<double, kStreamCount> r{};
  std::array<bool, kStreamCount> undefined{};
  for (std::size_t i = 0; i < kStreamCount; ++i) {
    try {
      r[i] = pearson(estimate.samples(), trial.candidates[i].samples());
    } catch (const UndefinedCorrelation&) {
      r[i] = -1.0;
      undefined[i] = true;
    }
  }
  AttentionResult result = classify_correlations(r, trial.true_target);
  result.undefined = undefined;
  result.metadata = trial.metadata;
  return result;
}

Interval wilson_interval(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) throw InvalidInput("wilson_interval: no trials");
  if (successes > trials) throw InvalidInput("wilson_interval: successes exceed trials");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  // The interval always contains p; clamp away rounding at p = 0 or 1.
  return {std::clamp(std::min(centre - half, p), 0.0, 1.0),
          std::clamp(std::max(centre + half, p), 0.0, 1.0)};
}

AccuracySummary detection_accuracy(std::span<const AttentionResult> results) {
  if (results.empty()) throw InvalidInput("detection_accuracy: no results");
  AccuracySummary summary;
  summary.n_trials = results.size();
  for (const AttentionResult& r : results) {
    if (r.correct) ++summary.n_correct;
    const std::pair<std::string, std::string> keys[] = {
        {"layout", std::to_string(r.metadata.layout_id)},
        {"level", std::to_string(r.metadata.level_id)},
        {"gender", r.metadata.target_gender},
    };
    for (const auto& [key, value] : keys) {
      ConditionAccuracy& cell = summary.breakdown[key][value];
      ++cell.n_trials;
      if (r.correct) ++cell.n_correct;
    }
  }
  summary.accuracy = static_cast<double>(summary.n_correct) / static_cast<double>(summary.n_trials);
  summary.interval = wilson_interval(summary.n_correct, summary.n_trials);
  for (auto& [key, cells] : summary.breakdown) {
    for (auto& [value, cell] : cells) {
      cell.accuracy = static_cast<double>(cell.n_correct) / static_cast<double>(cell.n_trials);
    }
  }
  return summary;
}

}  // namespace aad
