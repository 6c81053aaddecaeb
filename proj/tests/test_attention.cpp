#include "aad/attention.hpp"
#include "aad/error.hpp"
#include "aad/simulation.hpp"

#include "oracles.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>

namespace aad {
namespace {

using test::Rng;

TEST(Classify, ArgmaxExamples) {
  const auto a = classify_correlations({0.20, 0.05, -0.10}, 0);
  EXPECT_EQ(a.detected, 0u);
  EXPECT_TRUE(a.correct);
  EXPECT_FALSE(a.tie);
  const auto b = classify_correlations({0.05, 0.20, -0.10}, 0);
  EXPECT_EQ(b.detected, 1u);
  EXPECT_FALSE(b.correct);
}

TEST(Classify, ExactTieIsIncorrectAndPicksLowestIndex) {
  const auto t = classify_correlations({0.1, 0.3, 0.3}, 1);
  EXPECT_TRUE(t.tie);
  EXPECT_EQ(t.detected, 1u);
  EXPECT_FALSE(t.correct);
  const auto all = classify_correlations({0.0, 0.0, 0.0}, 0);
  EXPECT_TRUE(all.tie);
  EXPECT_EQ(all.detected, 0u);
  EXPECT_FALSE(all.correct);
  // A tie below the maximum is not a tie.
  EXPECT_FALSE(classify_correlations({0.5, 0.1, 0.1}, 0).tie);
}

TEST(Classify, ArgmaxInvariantUnderIncreasingTransforms) {
  Rng rng(1);
  std::uniform_real_distribution<double> r(-1.0, 1.0);
  const std::vector<std::function<double(double)>> transforms = {
      [](double x) { return std::exp(x); }, [](double x) { return x * x * x; },
      [](double x) { return 2.0 * x + 1.0; }, [](double x) { return std::atan(x) - 5.0; }};
  for (int trial = 0; trial < 200; ++trial) {
    const std::array<double, 3> v{r(rng), r(rng), r(rng)};
    const auto base = classify_correlations(v, 0);
    for (const auto& f : transforms) {
      const auto moved = classify_correlations({f(v[0]), f(v[1]), f(v[2])}, 0);
      EXPECT_EQ(moved.detected, base.detected);
      EXPECT_EQ(moved.correct, base.correct);
    }
  }
}

struct Fixture {
  Decoder decoder;
  std::vector<CocktailTrial> trials;
};

Fixture clean_fixture(double leakage, double snr_db, std::size_t n_test) {
  sim::SimulationConfig cfg;
  cfg.channels = 8;
  cfg.duration_s = 20.0;
  cfg.n_training_trials = 4;
  cfg.n_test_trials = n_test;
  cfg.leakage = leakage;
  cfg.snr_db = snr_db;
  const auto trf = sim::make_trf(cfg);
  Fixture f;
  f.decoder = fit_final_decoder(sim::generate_training_corpus(cfg, trf), cfg.lags(), 1.0);
  f.trials = sim::generate_test_trials(cfg, trf);
  return f;
}

TEST(Detect, NoiselessAttendedStreamWinsByMargin) {
  const Fixture f = clean_fixture(0.0, std::numeric_limits<double>::infinity(), 6);
  for (const auto& trial : f.trials) {
    const auto result = detect_attention(f.decoder, trial);
    EXPECT_TRUE(result.correct);
    EXPECT_GE(result.r_values[0] - std::max(result.r_values[1], result.r_values[2]), 0.3);
    // Correlations are those of the reconstruction against each candidate.
    const auto shat = reconstruct(f.decoder, trial.recording);
    for (std::size_t i = 0; i < 3; ++i) {
      EXPECT_NEAR(result.r_values[i], oracle::pearson(shat.samples(), trial.candidates[i].samples()), 1e-12);
    }
    EXPECT_EQ(result.metadata, trial.metadata);
  }
}

TEST(Detect, CandidateOrderEquivariance) {
  const Fixture f = clean_fixture(0.2, 10.0, 6);
  const std::array<std::array<std::size_t, 3>, 6> perms = {{
      {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  for (const auto& trial : f.trials) {
    const auto base = detect_attention(f.decoder, trial);
    for (const auto& p : perms) {
      CocktailTrial moved = trial;
      // Candidate i of the permuted trial is candidate p[i] of the original.
      for (std::size_t i = 0; i < 3; ++i) {
        moved.candidates[i] = trial.candidates[p[i]];
        if (p[i] == trial.true_target) moved.true_target = i;
      }
      const auto result = detect_attention(f.decoder, moved);
      for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(result.r_values[i], base.r_values[p[i]]);
      EXPECT_EQ(result.correct, base.correct);
    }
  }
}

TEST(Detect, UndefinedCorrelationScoresMinusOne) {
  Fixture f = clean_fixture(0.0, 30.0, 1);
  CocktailTrial trial = f.trials.front();
  trial.candidates[0] = test::raw_envelope(std::vector<double>(trial.candidates[0].size(), 0.0));
  const auto result = detect_attention(f.decoder, trial);
  EXPECT_TRUE(result.undefined[0]);
  EXPECT_EQ(result.r_values[0], -1.0);
  EXPECT_FALSE(result.correct);
}

TEST(Detect, RejectsMismatchedTrials) {
  Fixture f = clean_fixture(0.0, 30.0, 1);
  CocktailTrial trial = f.trials.front();
  trial.candidates[2].signal.samples.pop_back();
  EXPECT_THROW(detect_attention(f.decoder, trial), DimensionMismatch);
  trial = f.trials.front();
  trial.true_target = 3;
  EXPECT_THROW(detect_attention(f.decoder, trial), InvalidInput);
}

AttentionResult result_with(bool correct, int layout, int level, const std::string& gender) {
  AttentionResult r;
  r.correct = correct;
  r.detected = correct ? 0 : 1;
  r.metadata = {layout, level, gender};
  return r;
}

TEST(Accuracy, Arithmetic) {
  std::vector<AttentionResult> results;
  for (int i = 0; i < 18; ++i) results.push_back(result_with(i < 12, i % 3, i % 2, i < 9 ? "F" : "M"));
  const auto summary = detection_accuracy(results);
  EXPECT_EQ(summary.n_trials, 18u);
  EXPECT_EQ(summary.n_correct, 12u);
  EXPECT_NEAR(summary.accuracy, 0.6667, 1e-4);
  EXPECT_NEAR(summary.accuracy, 12.0 / 18.0, 1e-12);
  EXPECT_LE(summary.interval.low, summary.accuracy);
  EXPECT_GE(summary.interval.high, summary.accuracy);
  EXPECT_EQ(summary.breakdown.at("gender").at("F").n_trials, 9u);
  EXPECT_EQ(summary.breakdown.at("gender").at("F").n_correct, 9u);
  EXPECT_EQ(summary.breakdown.at("gender").at("M").n_correct, 3u);
  EXPECT_EQ(summary.breakdown.at("layout").size(), 3u);
  std::size_t total = 0;
  for (const auto& [value, cell] : summary.breakdown.at("level")) total += cell.n_trials;
  EXPECT_EQ(total, 18u);

  std::vector<AttentionResult> perfect(5, result_with(true, 0, 0, "F"));
  EXPECT_EQ(detection_accuracy(perfect).accuracy, 1.0);
  EXPECT_EQ(detection_accuracy(perfect).interval.high, 1.0);
  EXPECT_THROW(detection_accuracy({}), InvalidInput);
}

TEST(Accuracy, WilsonMatchesClosedForm) {
  for (const auto& [k, n] : std::vector<std::pair<int, int>>{{12, 18}, {100, 300}, {1, 10}, {50, 50}, {0, 7}}) {
    const auto lib = wilson_interval(static_cast<std::size_t>(k), static_cast<std::size_t>(n));
    const auto ref = oracle::wilson(k, n, 1.959963984540054);
    EXPECT_NEAR(lib.low, std::max(0.0, ref.low), 1e-12) << k << "/" << n;
    EXPECT_NEAR(lib.high, std::min(1.0, ref.high), 1e-12) << k << "/" << n;
  }
  EXPECT_THROW(wilson_interval(3, 2), InvalidInput);
  EXPECT_THROW(wilson_interval(0, 0), InvalidInput);
}

TEST(Accuracy, BoundsOnRandomResults) {
  Rng rng(2);
  std::bernoulli_distribution coin(0.4);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<AttentionResult> results;
    for (int i = 0; i <= trial; ++i) results.push_back(result_with(coin(rng), i % 5, i % 3, "M"));
    const auto s = detection_accuracy(results);
    EXPECT_GE(s.accuracy, 0.0);
    EXPECT_LE(s.accuracy, 1.0);
    EXPECT_LE(s.interval.low, s.accuracy);
    EXPECT_GE(s.interval.high, s.accuracy);
  }
}

TEST(Accuracy, PureNoiseIsAtChance) {
  // Random decoder on recordings that carry no stimulus information.
  Rng rng(3);
  Decoder decoder;
  decoder.lags = LagSpec::from_samples(0, 4);
  decoder.weights = Eigen::MatrixXd::Random(5, 4);
  std::vector<AttentionResult> results;
  for (int i = 0; i < 300; ++i) {
    CocktailTrial trial;
    trial.recording = test::random_recording(4, 400, rng);
    for (auto& c : trial.candidates) c = test::raw_envelope(test::uniform(400, rng));
    results.push_back(detect_attention(decoder, trial));
  }
  const auto s = detection_accuracy(results);
  const auto chance = wilson_interval(100, 300);
  EXPECT_GE(s.accuracy, chance.low);
  EXPECT_LE(s.accuracy, chance.high);
}

}  // namespace
}  // namespace aad
