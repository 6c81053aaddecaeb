#include "aad/error.hpp"
#include "aad/serialize.hpp"
#include "aad/simulation.hpp"

#include "oracles.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <set>

namespace aad::sim {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SimulationConfig small_config() {
  SimulationConfig cfg;
  cfg.channels = 8;
  cfg.duration_s = 20.0;
  cfg.n_training_trials = 4;
  cfg.n_test_trials = 6;
  return cfg;
}

// Causal convolution y(t) = Σ_k h(k) s(t − k), truncated to the input length.
std::vector<double> causal_conv(const std::vector<double>& s, const Eigen::RowVectorXd& h) {
  std::vector<double> y(s.size(), 0.0);
  for (std::size_t t = 0; t < s.size(); ++t) {
    for (Eigen::Index k = 0; k < h.size() && static_cast<std::size_t>(k) <= t; ++k) {
      y[t] += h(k) * s[t - static_cast<std::size_t>(k)];
    }
  }
  return y;
}

double centred_power(const std::vector<double>& x) {
  long double mean = 0.0L;
  for (const double v : x) mean += v;
  mean /= static_cast<long double>(x.size());
  long double p = 0.0L;
  for (const double v : x) p += (v - mean) * (v - mean);
  return static_cast<double>(p / static_cast<long double>(x.size()));
}

std::vector<double> row(const MultiChannelRecording& rec, Eigen::Index c) {
  return {rec.data.row(c).data(), rec.data.row(c).data() + rec.samples()};
}

TEST(Seeds, DistinctAndStable) {
  std::set<std::uint64_t> seen;
  for (const Stream s : {Stream::Trf, Stream::TrainEnvelope, Stream::TrainNoise, Stream::TestEnvelope,
                         Stream::TestNoise}) {
    for (std::uint64_t i = 0; i < 100; ++i) seen.insert(derive_seed(1, s, i));
  }
  EXPECT_EQ(seen.size(), 500u);
  EXPECT_EQ(derive_seed(7, Stream::TestNoise, 3), derive_seed(7, Stream::TestNoise, 3));
  EXPECT_NE(derive_seed(7, Stream::TestNoise, 3), derive_seed(8, Stream::TestNoise, 3));
}

TEST(Trf, ShapeNormAndDeterminism) {
  const ForwardTRF trf = make_trf(16, 128.0, 250.0, 5);
  EXPECT_EQ(trf.kernels.rows(), 16);
  EXPECT_EQ(trf.kernels.cols(), 33);
  for (Eigen::Index c = 0; c < 16; ++c) EXPECT_NEAR(trf.kernels.row(c).norm(), 1.0, 1e-12);
  EXPECT_TRUE(trf.kernels.allFinite());
  EXPECT_EQ(make_trf(16, 128.0, 250.0, 5).kernels, trf.kernels);
  EXPECT_NE(make_trf(16, 128.0, 250.0, 6).kernels, trf.kernels);
  // Decaying: late taps carry less energy than early ones on average.
  EXPECT_LT(trf.kernels.rightCols(8).squaredNorm(), trf.kernels.leftCols(8).squaredNorm());
  EXPECT_THROW(make_trf(0, 128.0, 250.0, 1), InvalidInput);
}

TEST(Envelope, DeterministicNormalizedAndSized) {
  const Envelope a = gen_envelope(40.0, 128.0, 9);
  EXPECT_EQ(a.size(), 5120u);
  EXPECT_EQ(a, gen_envelope(40.0, 128.0, 9));
  EXPECT_NE(a.samples(), gen_envelope(40.0, 128.0, 10).samples());
  EXPECT_TRUE(a.normalized);
  const auto [lo, hi] = std::minmax_element(a.samples().begin(), a.samples().end());
  EXPECT_EQ(*lo, 0.0);
  EXPECT_EQ(*hi, 1.0);
  EXPECT_THROW(gen_envelope(0.0, 128.0, 1), InvalidInput);
}

TEST(Envelope, SpectralMassStaysInBand) {
  const Envelope e = gen_envelope(20.0, 128.0, 3);
  const std::size_t n = e.size();
  long double mean = 0.0L;
  for (const double v : e.samples()) mean += v;
  mean /= n;
  long double total = 0.0L, above = 0.0L;
  for (std::size_t k = 1; k <= n / 2; ++k) {
    std::complex<long double> acc = 0.0L;
    for (std::size_t t = 0; t < n; ++t) {
      const long double a = -2.0L * std::numbers::pi_v<long double> * k * t / n;
      acc += (e.samples()[t] - mean) * std::complex<long double>(std::cos(a), std::sin(a));
    }
    const long double p = std::norm(acc);
    total += p;
    if (static_cast<double>(k) * 128.0 / n > 30.0) above += p;
  }
  EXPECT_LE(above / total, 0.01L);
}

TEST(Synthesize, NoiselessNoLeakageIsFilteredCopy) {
  const ForwardTRF trf = make_trf(4, 128.0, 250.0, 2);
  const Envelope att = gen_envelope(5.0, 128.0, 1);
  const std::vector<Envelope> others{gen_envelope(5.0, 128.0, 2), gen_envelope(5.0, 128.0, 3)};
  const auto rec = synthesize_recording(att, others, trf, {0.0, kInf, 0});
  ASSERT_EQ(rec.channels(), 4);
  ASSERT_EQ(rec.samples(), 640);
  for (Eigen::Index c = 0; c < 4; ++c) {
    const auto ref = causal_conv(att.samples(), trf.kernels.row(c));
    const auto got = row(rec, c);
    for (std::size_t t = 0; t < ref.size(); ++t) EXPECT_NEAR(got[t], ref[t], 1e-12);
  }
}

TEST(Synthesize, LeakageAddsShiftedKernels) {
  const ForwardTRF trf = make_trf(2, 128.0, 250.0, 2);
  const Envelope att = gen_envelope(5.0, 128.0, 1);
  const std::vector<Envelope> others{gen_envelope(5.0, 128.0, 2), gen_envelope(5.0, 128.0, 3)};
  const auto rec = synthesize_recording(att, others, trf, {0.3, kInf, 0});
  const Eigen::Index taps = trf.kernels.cols();
  for (Eigen::Index c = 0; c < 2; ++c) {
    auto ref = causal_conv(att.samples(), trf.kernels.row(c));
    for (Eigen::Index j = 0; j < 2; ++j) {
      Eigen::RowVectorXd shifted(taps);
      const Eigen::Index shift = (j + 1) * taps / 3;
      for (Eigen::Index k = 0; k < taps; ++k) shifted((k + shift) % taps) = trf.kernels(c, k);
      const auto u = causal_conv(others[static_cast<std::size_t>(j)].samples(), shifted);
      for (std::size_t t = 0; t < ref.size(); ++t) ref[t] += 0.3 * u[t];
    }
    const auto got = row(rec, c);
    for (std::size_t t = 0; t < ref.size(); ++t) EXPECT_NEAR(got[t], ref[t], 1e-12);
  }
}

TEST(Synthesize, SnrAccounting) {
  const ForwardTRF trf = make_trf(6, 128.0, 250.0, 4);
  const Envelope att = gen_envelope(30.0, 128.0, 1);
  const std::vector<Envelope> others{gen_envelope(30.0, 128.0, 2), gen_envelope(30.0, 128.0, 3)};
  const auto clean = synthesize_recording(att, others, trf, {0.2, kInf, 0});
  for (const double snr : {-20.0, -5.0, 0.0, 10.0, 30.0}) {
    const auto noisy = synthesize_recording(att, others, trf, {0.2, snr, 77});
    for (Eigen::Index c = 0; c < 6; ++c) {
      const auto s = row(clean, c);
      auto n = row(noisy, c);
      for (std::size_t t = 0; t < n.size(); ++t) n[t] -= s[t];
      const double measured = 10.0 * std::log10(centred_power(s) / centred_power(n));
      EXPECT_NEAR(measured, snr, 0.5) << "snr " << snr << " channel " << c;
    }
  }
}

TEST(Synthesize, NoiseOnlyCarriesNoEnvelope) {
  const ForwardTRF trf = make_trf(4, 128.0, 250.0, 4);
  const Envelope att = gen_envelope(45.0, 128.0, 1);
  const auto rec = synthesize_recording(att, {}, trf, {0.0, -kInf, 5});
  EXPECT_GE(rec.samples(), 5000);
  for (Eigen::Index c = 0; c < 4; ++c) {
    EXPECT_LE(std::abs(oracle::pearson(row(rec, c), att.samples())), 0.1);
    EXPECT_NEAR(centred_power(row(rec, c)), 1.0, 1e-9);
  }
}

TEST(Synthesize, Errors) {
  const ForwardTRF trf = make_trf(2, 128.0, 250.0, 1);
  const Envelope att = gen_envelope(5.0, 128.0, 1);
  const std::vector<Envelope> short_one{gen_envelope(4.0, 128.0, 2)};
  EXPECT_THROW(synthesize_recording(att, short_one, trf, {0.1, 10.0, 0}), DimensionMismatch);
  EXPECT_THROW(synthesize_recording(att, {}, trf, {1.5, 10.0, 0}), InvalidInput);
  EXPECT_THROW(synthesize_recording(att, {}, trf, {0.1, std::nan(""), 0}), InvalidInput);
  EXPECT_THROW(synthesize_recording(gen_envelope(5.0, 100.0, 1), {}, trf, {0.1, 10.0, 0}),
               DimensionMismatch);
}

TEST(Config, Validation) {
  EXPECT_NO_THROW(SimulationConfig{}.validate());
  const auto broken = [](auto mutate) {
    SimulationConfig cfg;
    mutate(cfg);
    return cfg;
  };
  EXPECT_THROW(broken([](auto& c) { c.channels = 0; }).validate(), ConfigError);
  EXPECT_THROW(broken([](auto& c) { c.duration_s = 0.1; }).validate(), ConfigError);
  EXPECT_THROW(broken([](auto& c) { c.leakage = -0.1; }).validate(), ConfigError);
  EXPECT_THROW(broken([](auto& c) { c.snr_db = std::nan(""); }).validate(), ConfigError);
  EXPECT_THROW(broken([](auto& c) { c.n_training_trials = 1; }).validate(), ConfigError);
  EXPECT_THROW(broken([](auto& c) { c.lambda_grid.clear(); }).validate(), ConfigError);
  EXPECT_THROW(broken([](auto& c) { c.rate = 50.0; }).validate(), InvalidBand);
}

TEST(TestTrials, FactorialMetadata) {
  SimulationConfig cfg = small_config();
  cfg.n_test_trials = 18;
  cfg.duration_s = 2.0;
  const auto trials = generate_test_trials(cfg, make_trf(cfg));
  std::set<std::tuple<int, int, std::string>> combos;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const auto& m = trials[i].metadata;
    EXPECT_EQ(m.level_id, static_cast<int>(i % 3));
    EXPECT_EQ(m.target_gender, (i / 3) % 2 == 0 ? "F" : "M");
    EXPECT_EQ(m.layout_id, static_cast<int>((i / 6) % 3));
    EXPECT_EQ(trials[i].true_target, 0u);
    combos.insert({m.layout_id, m.level_id, m.target_gender});
  }
  EXPECT_EQ(combos.size(), 18u);
}

TEST(TestTrials, SwappingAttendedStreamMovesTheWinner) {
  SimulationConfig cfg = small_config();
  cfg.snr_db = 20.0;
  const auto trf = make_trf(cfg);
  const Decoder decoder = fit_final_decoder(generate_training_corpus(cfg, trf), cfg.lags(), 1.0);
  const Envelope a = gen_envelope(cfg.duration_s, cfg.rate, 101);
  const Envelope b = gen_envelope(cfg.duration_s, cfg.rate, 102);
  const Envelope c = gen_envelope(cfg.duration_s, cfg.rate, 103);
  CocktailTrial trial;
  trial.candidates = {a, b, c};
  const std::vector<Envelope> bc{b, c}, ac{a, c};
  trial.recording = synthesize_recording(a, bc, trf, {0.2, 20.0, 1});
  EXPECT_EQ(detect_attention(decoder, trial).detected, 0u);
  trial.recording = synthesize_recording(b, ac, trf, {0.2, 20.0, 1});
  EXPECT_EQ(detect_attention(decoder, trial).detected, 1u);
}

TEST(Experiment, DeterministicUnderSeed) {
  SimulationConfig cfg = small_config();
  cfg.duration_s = 10.0;
  const auto first = run_experiment(cfg);
  const auto second = run_experiment(cfg);
  EXPECT_EQ(dump(accuracy_summary_to_json(first.summary)), dump(accuracy_summary_to_json(second.summary)));
  EXPECT_EQ(dump(cv_report_to_json(first.cv)), dump(cv_report_to_json(second.cv)));
  EXPECT_EQ(first.decoder, second.decoder);
  EXPECT_EQ(first.results, second.results);
  cfg.seed = 2;
  const auto other = run_experiment(cfg);
  EXPECT_NE(other.results.front().r_values, first.results.front().r_values);
}

TEST(Experiment, IndependentOfWorkerCount) {
  SimulationConfig cfg = small_config();
  cfg.duration_s = 5.0;
  ::setenv("AAD_THREADS", "1", 1);
  const auto serial = run_experiment(cfg);
  ::setenv("AAD_THREADS", "3", 1);
  const auto threaded = run_experiment(cfg);
  ::unsetenv("AAD_THREADS");
  EXPECT_EQ(serial.decoder, threaded.decoder);
  EXPECT_EQ(serial.results, threaded.results);
  EXPECT_EQ(serial.cv.mean_r, threaded.cv.mean_r);
}

TEST(Experiment, BackwardRecoverability) {
  SimulationConfig cfg = small_config();
  cfg.leakage = 0.0;
  cfg.snr_db = 40.0;
  const auto result = run_experiment(cfg);
  for (const auto& r : result.results) EXPECT_GE(r.r_values[0], 0.95);
  EXPECT_EQ(result.summary.accuracy, 1.0);
}

TEST(Experiment, ModerateNoiseDecodesWell) {
  SimulationConfig cfg = small_config();
  cfg.n_test_trials = 18;
  cfg.snr_db = 20.0;
  cfg.leakage = 0.2;
  EXPECT_GE(run_experiment(cfg).summary.accuracy, 0.9);
}

}  // namespace
}  // namespace aad::sim
