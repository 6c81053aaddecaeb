#pragma once

#include "aad/decoding.hpp"
#include "aad/signal.hpp"

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace aad {

inline constexpr std::size_t kStreamCount = 3;

struct TrialMetadata {
  int layout_id = 0;
  int level_id = 0;
  std::string target_gender;  // "F" or "M"
  bool operator==(const TrialMetadata&) const = default;
};

// One cocktail-party trial: a recording and the three candidate envelopes
// ordered (target, masker 1, masker 2).
struct CocktailTrial {
  MultiChannelRecording recording;
  std::array<Envelope, kStreamCount> candidates;
  std::size_t true_target = 0;
  TrialMetadata metadata;

  void validate() const;
};

struct AttentionResult {
  std::array<double, kStreamCount> r_values{};
  std::array<bool, kStreamCount> undefined{};  // r forced to −1
  std::size_t detected = 0;
  std::size_t true_target = 0;
  bool correct = false;
  bool tie = false;
  TrialMetadata metadata;
  bool operator==(const AttentionResult&) const = default;
};

// Argmax over r; an exact tie for the maximum picks the lowest tied index,
// sets `tie`, and counts as incorrect.
AttentionResult classify_correlations(const std::array<double, kStreamCount>& r_values,
                                      std::size_t true_target);

// Reconstructs the envelope from the recording and correlates it with each
// candidate. An undefined correlation scores −1 and is flagged.
AttentionResult detect_attention(const Decoder& decoder, const CocktailTrial& trial);

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

// Wilson score interval for `successes` out of `trials` at normal quantile z.
Interval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.959963984540054);

struct ConditionAccuracy {
  std::size_t n_trials = 0;
  std::size_t n_correct = 0;
  double accuracy = 0.0;
  bool operator==(const ConditionAccuracy&) const = default;
};

struct AccuracySummary {
  std::size_t n_trials = 0;
  std::size_t n_correct = 0;
  double accuracy = 0.0;
  Interval interval;  // Wilson 95%
  // breakdown["layout" | "level" | "gender"][value]
  std::map<std::string, std::map<std::string, ConditionAccuracy>> breakdown;
};

AccuracySummary detection_accuracy(std::span<const AttentionResult> results);

}  // namespace aad
