#include "aad/signal.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

namespace {

aad::SampledSignal tone(std::size_t n, double rate) {
  aad::SampledSignal x;
  x.rate = rate;
  x.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate;
    x.samples[i] = (1.0 + 0.5 * std::cos(2 * std::numbers::pi * 3.0 * t)) *
                   std::cos(2 * std::numbers::pi * 440.0 * t);
  }
  return x;
}

// Arguments are seconds of audio at 16 kHz.
void BM_AnalyticEnvelope(benchmark::State& state) {
  const auto x = tone(static_cast<std::size_t>(state.range(0)) * 16000, 16000.0);
  for (auto _ : state) benchmark::DoNotOptimize(aad::analytic_envelope(x));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(x.size()));
}
BENCHMARK(BM_AnalyticEnvelope)->Arg(10)->Arg(60)->Unit(benchmark::kMillisecond);

void BM_BandpassZeroPhase(benchmark::State& state) {
  const auto x = tone(static_cast<std::size_t>(state.range(0)) * 16000, 16000.0);
  for (auto _ : state) benchmark::DoNotOptimize(aad::bandpass_zero_phase(x, aad::BandSpec{}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(x.size()));
}
BENCHMARK(BM_BandpassZeroPhase)->Arg(10)->Arg(60)->Unit(benchmark::kMillisecond);

void BM_Resample(benchmark::State& state) {
  const auto x = tone(static_cast<std::size_t>(state.range(0)) * 16000, 16000.0);
  for (auto _ : state) benchmark::DoNotOptimize(aad::resample(x, aad::kWorkingRate));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(x.size()));
}
BENCHMARK(BM_Resample)->Arg(10)->Arg(60)->Unit(benchmark::kMillisecond);

void BM_PreprocessStimulus(benchmark::State& state) {
  const auto x = tone(static_cast<std::size_t>(state.range(0)) * 16000, 16000.0);
  for (auto _ : state) benchmark::DoNotOptimize(aad::preprocess_stimulus(x));
}
BENCHMARK(BM_PreprocessStimulus)->Arg(30)->Unit(benchmark::kMillisecond);

void BM_PreprocessRecording(benchmark::State& state) {
  aad::MultiChannelRecording rec;
  rec.rate = 1000.0;
  rec.data.resize(state.range(0), 30000);
  for (Eigen::Index c = 0; c < rec.data.rows(); ++c) {
    const auto x = tone(30000, 1000.0);
    for (Eigen::Index t = 0; t < rec.data.cols(); ++t) rec.data(c, t) = x.samples[t] * (1.0 + 0.01 * c);
  }
  for (auto _ : state) benchmark::DoNotOptimize(aad::preprocess_recording(rec));
}
BENCHMARK(BM_PreprocessRecording)->Arg(8)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
