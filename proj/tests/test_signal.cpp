#include "aad/error.hpp"
#include "aad/fft.hpp"
#include "aad/iir.hpp"
#include "aad/signal.hpp"

#include "oracles.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

namespace aad {
namespace {

using test::cosine;
using test::sampled;

// |x + jH{x}| from a naive O(n²) DFT.
std::vector<double> naive_hilbert_envelope(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<long double>> X(n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t t = 0; t < n; ++t) {
      const long double a = -2.0L * std::numbers::pi_v<long double> * k * t / n;
      X[k] += static_cast<long double>(x[t]) * std::complex<long double>(std::cos(a), std::sin(a));
    }
  }
  for (std::size_t k = 1; k < n; ++k) {
    if (2 * k < n) {
      X[k] *= 2.0L;
    } else if (2 * k > n) {
      X[k] = 0.0L;
    }
  }
  std::vector<double> env(n);
  for (std::size_t t = 0; t < n; ++t) {
    std::complex<long double> acc = 0.0L;
    for (std::size_t k = 0; k < n; ++k) {
      const long double a = 2.0L * std::numbers::pi_v<long double> * k * t / n;
      acc += X[k] * std::complex<long double>(std::cos(a), std::sin(a));
    }
    env[t] = static_cast<double>(std::abs(acc) / static_cast<long double>(n));
  }
  return env;
}

std::vector<double> slice(const std::vector<double>& v, std::size_t begin, std::size_t end) {
  return {v.begin() + static_cast<long>(begin), v.begin() + static_cast<long>(end)};
}

TEST(Fft, RoundTrip) {
  test::Rng rng(3);
  for (const std::size_t n : {1u, 2u, 7u, 64u, 1000u}) {
    const auto x = test::gaussian(n, rng);
    const auto back = fft::inverse_real(fft::forward_real(x), n);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(back[i], x[i], 1e-12);
  }
}

TEST(AnalyticEnvelope, MatchesNaiveDftConstruction) {
  test::Rng rng(11);
  for (const std::size_t n : {64u, 63u, 2u, 3u}) {
    const auto x = test::gaussian(n, rng);
    const auto env = analytic_envelope(sampled(x, 100.0));
    const auto ref = naive_hilbert_envelope(x);
    ASSERT_EQ(env.size(), n);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(env.samples[i], ref[i], 1e-12) << n << ":" << i;
  }
}

TEST(AnalyticEnvelope, ZeroSignalGivesZeroEnvelope) {
  const auto env = analytic_envelope(sampled(std::vector<double>(100, 0.0), 1000.0));
  EXPECT_EQ(env.rate, 1000.0);
  for (const double v : env.samples) EXPECT_EQ(v, 0.0);
}

TEST(AnalyticEnvelope, PureToneHasFlatEnvelope) {
  const double amplitude = 2.5;
  const auto env = analytic_envelope(sampled(cosine(1000, 1000.0, 100.0, amplitude), 1000.0));
  for (std::size_t i = 50; i < 950; ++i) EXPECT_NEAR(env.samples[i], amplitude, 0.01 * amplitude);
}

TEST(AnalyticEnvelope, RecoversAmplitudeModulator) {
  const std::size_t n = 1000;
  std::vector<double> x(n), modulator(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / 1000.0;
    modulator[i] = 1.0 + 0.5 * std::cos(2 * std::numbers::pi * 2 * t);
    x[i] = modulator[i] * std::cos(2 * std::numbers::pi * 100 * t);
  }
  const auto env = analytic_envelope(sampled(x, 1000.0));
  EXPECT_GE(oracle::pearson(slice(env.samples, 50, 950), slice(modulator, 50, 950)), 0.99);
}

TEST(AnalyticEnvelope, RejectsBadInput) {
  EXPECT_THROW(analytic_envelope(sampled({1.0, std::nan(""), 2.0}, 10.0)), InvalidInput);
  EXPECT_THROW(analytic_envelope(sampled({1.0, std::numeric_limits<double>::infinity()}, 10.0)),
               InvalidInput);
  EXPECT_THROW(analytic_envelope(sampled({1.0}, 10.0)), InvalidInput);
  EXPECT_THROW(analytic_envelope(sampled({1.0, 2.0}, 0.0)), InvalidInput);
}

// Bilinear-transform Butterworth: |H| = 1/sqrt(1 + (Ω/Ωc)^(2n)) with Ω = tan(π f / fs).
double butter_lowpass_mag(int order, double fc, double f, double fs) {
  const double ratio = std::tan(std::numbers::pi * f / fs) / std::tan(std::numbers::pi * fc / fs);
  return 1.0 / std::sqrt(1.0 + std::pow(ratio, 2 * order));
}

double butter_highpass_mag(int order, double fc, double f, double fs) {
  const double ratio = std::tan(std::numbers::pi * fc / fs) / std::tan(std::numbers::pi * f / fs);
  return 1.0 / std::sqrt(1.0 + std::pow(ratio, 2 * order));
}

TEST(Butterworth, MagnitudeMatchesClosedForm) {
  const double fs = 1000.0;
  for (const int order : {2, 4, 6}) {
    const auto lp = iir::butterworth_lowpass(order, 30.0, fs);
    const auto hp = iir::butterworth_highpass(order, 0.3, fs);
    ASSERT_EQ(lp.size(), static_cast<std::size_t>(order / 2));
    for (const double f : {0.05, 0.3, 1.0, 5.0, 29.0, 30.0, 31.0, 50.0, 200.0, 499.0}) {
      EXPECT_NEAR(iir::magnitude_response(lp, f, fs), butter_lowpass_mag(order, 30.0, f, fs), 1e-9)
          << "lp order " << order << " f " << f;
      EXPECT_NEAR(iir::magnitude_response(hp, f, fs), butter_highpass_mag(order, 0.3, f, fs), 1e-9)
          << "hp order " << order << " f " << f;
    }
  }
}

TEST(Butterworth, BandpassIsProductOfEdges) {
  const double fs = 128.0;
  const auto bp = iir::butterworth_bandpass(kBandpassOrder, 0.3, 30.0, fs);
  EXPECT_EQ(bp.size(), static_cast<std::size_t>(kBandpassOrder));
  for (const double f : {0.1, 0.3, 2.0, 10.0, 30.0, 45.0}) {
    const double expect = butter_highpass_mag(kBandpassOrder, 0.3, f, fs) *
                          butter_lowpass_mag(kBandpassOrder, 30.0, f, fs);
    EXPECT_NEAR(iir::magnitude_response(bp, f, fs), expect, 1e-9) << f;
  }
}

TEST(Iir, SteadyStateStartHoldsConstantInput) {
  const auto lp = iir::butterworth_lowpass(4, 10.0, 100.0);
  const auto y = iir::filter(std::vector<double>(200, 3.0), lp, true);
  for (const double v : y) EXPECT_NEAR(v, 3.0, 1e-12);
}

TEST(Iir, ImpulseResponseMatchesDifferenceEquation) {
  const iir::Biquad bq{0.2, 0.3, 0.1, -0.5, 0.25};
  std::vector<double> x(20, 0.0);
  x[0] = 1.0;
  const iir::Biquad sos[] = {bq};
  const auto y = iir::filter(x, sos, false);
  std::vector<double> ref(20, 0.0);
  for (int n = 0; n < 20; ++n) {
    const auto X = [&](int i) { return i >= 0 ? x[i] : 0.0; };
    const auto Y = [&](int i) { return i >= 0 ? ref[i] : 0.0; };
    ref[n] = bq.b0 * X(n) + bq.b1 * X(n - 1) + bq.b2 * X(n - 2) - bq.a1 * Y(n - 1) - bq.a2 * Y(n - 2);
  }
  for (int n = 0; n < 20; ++n) EXPECT_NEAR(y[n], ref[n], 1e-15);
}

TEST(Bandpass, RemovesDcOffset) {
  const auto y = bandpass_zero_phase(sampled(std::vector<double>(10000, 1.0), 1000.0), BandSpec{});
  ASSERT_EQ(y.size(), 10000u);
  double worst = 0.0;
  for (std::size_t i = 500; i < 9500; ++i) worst = std::max(worst, std::abs(y.samples[i]));
  EXPECT_LE(worst, 0.01);
}

TEST(Bandpass, PassesInBandToneWithoutDelay) {
  const auto x = cosine(10000, 1000.0, 5.0);
  const auto y = bandpass_zero_phase(sampled(x, 1000.0), BandSpec{});
  EXPECT_EQ(y.rate, 1000.0);
  const double gain = oracle::tone_amplitude(y.samples, 1000.0, 5.0, 1000, 9000);
  EXPECT_NEAR(gain, 1.0, 0.05);
  EXPECT_EQ(oracle::xcorr_peak_lag(x, y.samples, 50), 0);
}

TEST(Bandpass, Attenuates50HzTone) {
  const auto x = cosine(10000, 1000.0, 50.0);
  const auto y = bandpass_zero_phase(sampled(x, 1000.0), BandSpec{});
  const double gain = oracle::tone_amplitude(y.samples, 1000.0, 50.0, 1000, 9000);
  EXPECT_LE(20.0 * std::log10(gain), -30.0);
}

TEST(Bandpass, ZeroPhaseForInBandTones) {
  test::Rng rng(5);
  std::uniform_real_distribution<double> freq(1.0, 25.0), phase(0.0, 6.28);
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = cosine(4000, 200.0, freq(rng), 1.0, phase(rng));
    const auto y = bandpass_zero_phase(sampled(x, 200.0), BandSpec{});
    EXPECT_EQ(oracle::xcorr_peak_lag(x, y.samples, 5), 0) << trial;
  }
}

TEST(Bandpass, PaddingCoversThreeFilterOrders) {
  EXPECT_GE(bandpass_padding(BandSpec{}, 1000.0), std::size_t{3 * 2 * kBandpassOrder});
  EXPECT_GE(bandpass_padding(BandSpec{}, 128.0), std::size_t{3 * 2 * kBandpassOrder});
  // Shorter input than the padding still filters.
  const auto y = bandpass_zero_phase(sampled(cosine(10, 128.0, 5.0), 128.0), BandSpec{});
  EXPECT_EQ(y.size(), 10u);
}

TEST(Bandpass, RejectsInvalidBands) {
  const auto x = sampled(cosine(100, 100.0, 5.0), 100.0);
  EXPECT_THROW(bandpass_zero_phase(x, BandSpec{0.3, 50.0}), InvalidBand);
  EXPECT_THROW(bandpass_zero_phase(x, BandSpec{0.0, 30.0}), InvalidBand);
  EXPECT_THROW(bandpass_zero_phase(x, BandSpec{10.0, 5.0}), InvalidBand);
  EXPECT_THROW(bandpass_zero_phase(sampled(cosine(100, 50.0, 5.0), 50.0), BandSpec{}), InvalidBand);
}

TEST(Resample, RatioIsReduced) {
  const auto r = resample_ratio(1000.0, 128.0);
  EXPECT_EQ(r.up, 16);
  EXPECT_EQ(r.down, 125);
  const auto s = resample_ratio(16000.0, 128.0);
  EXPECT_EQ(s.up, 1);
  EXPECT_EQ(s.down, 125);
  const auto u = resample_ratio(128.0, 1000.0);
  EXPECT_EQ(u.up, 125);
  EXPECT_EQ(u.down, 16);
}

TEST(Resample, LengthFollowsRatio) {
  EXPECT_EQ(resample(sampled(std::vector<double>(1000, 0.5), 1000.0), 128.0).size(), 128u);
  EXPECT_EQ(resample(sampled(std::vector<double>(60000, 0.5), 1000.0), 128.0).size(), 7680u);
  EXPECT_EQ(resample(sampled(std::vector<double>(1001, 0.5), 1000.0), 128.0).size(), 129u);
  EXPECT_EQ(resample(sampled(std::vector<double>(100, 0.5), 128.0), 1000.0).size(), 782u);
  const auto y = resample(sampled(std::vector<double>(1000, 0.5), 1000.0), 128.0);
  EXPECT_EQ(y.rate, 128.0);
}

TEST(Resample, IdentityIsBitExact) {
  test::Rng rng(2);
  const auto x = sampled(test::gaussian(777, rng), 500.0);
  EXPECT_EQ(resample(x, 500.0), x);
}

TEST(Resample, TracksSampledSinusoid) {
  const auto y = resample(sampled(cosine(5000, 1000.0, 10.0), 1000.0), 128.0);
  const auto ref = cosine(y.size(), 128.0, 10.0);
  EXPECT_GE(oracle::pearson(slice(y.samples, 20, y.size() - 20), slice(ref, 20, y.size() - 20)), 0.999);
}

TEST(Resample, RejectsBadRates) {
  const auto x = sampled({1.0, 2.0, 3.0}, 100.0);
  EXPECT_THROW(resample(x, 0.0), InvalidInput);
  EXPECT_THROW(resample(x, -5.0), InvalidInput);
}

TEST(Normalize, MinMaxExamples) {
  auto e = normalize_unit_interval(sampled({2, 4, 6}, 1.0));
  EXPECT_EQ(e.samples(), (std::vector<double>{0.0, 0.5, 1.0}));
  EXPECT_TRUE(e.normalized);
  EXPECT_FALSE(e.degenerate);
  e = normalize_unit_interval(sampled({-1, 0, 3}, 1.0));
  EXPECT_EQ(e.samples(), (std::vector<double>{0.0, 0.25, 1.0}));
  e = normalize_unit_interval(sampled({3, 3, 3}, 1.0));
  EXPECT_EQ(e.samples(), (std::vector<double>{0.0, 0.0, 0.0}));
  EXPECT_TRUE(e.degenerate);
}

TEST(Normalize, IdempotentAndBounded) {
  test::Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const auto x = test::gaussian(1 + trial * 7, rng, 1.0 + trial);
    const auto once = normalize_unit_interval(sampled(x, 128.0));
    const auto twice = normalize_unit_interval(once.signal);
    EXPECT_EQ(once.samples(), twice.samples());
    const auto [lo, hi] = std::minmax_element(once.samples().begin(), once.samples().end());
    EXPECT_GE(*lo, 0.0);
    EXPECT_TRUE(*hi == 1.0 || once.degenerate);
  }
}

TEST(PreprocessStimulus, RecoversModulatorAt128Hz) {
  const std::size_t n = 20000;
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / 1000.0;
    x[i] = (1.0 + 0.5 * std::cos(2 * std::numbers::pi * 2 * t)) * std::cos(2 * std::numbers::pi * 100 * t);
  }
  const Envelope env = preprocess_stimulus(sampled(x, 1000.0));
  EXPECT_EQ(env.rate(), 128.0);
  ASSERT_EQ(env.size(), 2560u);
  EXPECT_TRUE(env.normalized);
  std::vector<double> modulator(env.size());
  for (std::size_t i = 0; i < env.size(); ++i) {
    modulator[i] = 1.0 + 0.5 * std::cos(2 * std::numbers::pi * 2 * static_cast<double>(i) / 128.0);
  }
  const std::size_t margin = 64;
  EXPECT_GE(oracle::pearson(slice(env.samples(), margin, env.size() - margin),
                            slice(modulator, margin, env.size() - margin)),
            0.98);
}

// The envelope sits on a large offset; the edges must not ring.
TEST(PreprocessStimulus, ModulatorRecoveredUpToTheEdges) {
  for (const double fm : {0.7, 2.0, 3.7}) {
    std::vector<double> x(7000);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double t = static_cast<double>(i) / 1000.0;
      x[i] = (1.0 + 0.5 * std::cos(2 * std::numbers::pi * fm * t)) * std::cos(2 * std::numbers::pi * 100 * t);
    }
    const Envelope env = preprocess_stimulus(sampled(x, 1000.0));
    std::vector<double> modulator(env.size());
    for (std::size_t i = 0; i < env.size(); ++i) {
      modulator[i] = std::cos(2 * std::numbers::pi * fm * static_cast<double>(i) / 128.0);
    }
    EXPECT_GE(oracle::pearson(env.samples(), modulator), 0.99) << fm;
  }
}

TEST(PreprocessStimulus, SilentAudioIsDegenerate) {
  const Envelope env = preprocess_stimulus(sampled(std::vector<double>(8000, 0.0), 8000.0));
  EXPECT_TRUE(env.degenerate);
  for (const double v : env.samples()) EXPECT_EQ(v, 0.0);
}

TEST(PreprocessStimulus, WhiteNoiseLength) {
  test::Rng rng(40);
  const Envelope env = preprocess_stimulus(sampled(test::gaussian(40 * 16000, rng), 16000.0));
  EXPECT_EQ(env.size(), 5120u);
  EXPECT_EQ(env.rate(), 128.0);
}

TEST(PreprocessStimulus, RejectsLowRate) {
  EXPECT_THROW(preprocess_stimulus(sampled(std::vector<double>(100, 1.0), 50.0)), InvalidBand);
}

TEST(PreprocessRecording, ShapeRangeAndDeterminism) {
  test::Rng rng(64);
  MultiChannelRecording rec = test::random_recording(64, 60000, rng, 1000.0);
  rec.data.row(3).setConstant(0.7);
  rec.data.row(5) = rec.data.row(4);
  const auto out = preprocess_recording(rec);
  EXPECT_EQ(out.recording.channels(), 64);
  EXPECT_EQ(out.recording.samples(), 7680);
  EXPECT_EQ(out.recording.rate, 128.0);
  EXPECT_GE(out.recording.data.minCoeff(), 0.0);
  EXPECT_LE(out.recording.data.maxCoeff(), 1.0);
  ASSERT_EQ(out.degenerate_channels.size(), 1u);
  EXPECT_EQ(out.degenerate_channels.front(), 3);
  EXPECT_TRUE((out.recording.data.row(3).array() == 0.0).all());
  EXPECT_TRUE(out.recording.data.row(4) == out.recording.data.row(5));

  const auto again = preprocess_recording(rec);
  EXPECT_TRUE(again.recording == out.recording);
}

TEST(Types, ValidationRejectsBrokenValues) {
  EXPECT_THROW(sampled({}, 10.0).validate(), InvalidInput);
  EXPECT_THROW(sampled({1.0}, 0.0).validate(), InvalidInput);
  EXPECT_NO_THROW(sampled({1.0}, 10.0).validate());
  MultiChannelRecording rec;
  rec.rate = 10.0;
  rec.data = ChannelMatrix::Ones(2, 5);
  EXPECT_NO_THROW(rec.validate());
  rec.channel_labels = {"only one"};
  EXPECT_THROW(rec.validate(), InvalidInput);
  rec.channel_labels.clear();
  rec.data(1, 2) = std::nan("");
  EXPECT_THROW(rec.validate(), InvalidInput);
}

}  // namespace
}  // namespace aad
