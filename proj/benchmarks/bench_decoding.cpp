#include "aad/decoding.hpp"
#include "aad/simulation.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

aad::MultiChannelRecording random_recording(Eigen::Index channels, Eigen::Index samples) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> gauss;
  aad::MultiChannelRecording rec;
  rec.rate = aad::kWorkingRate;
  rec.data.resize(channels, samples);
  for (Eigen::Index i = 0; i < rec.data.size(); ++i) rec.data.data()[i] = gauss(rng);
  return rec;
}

std::vector<double> random_target(Eigen::Index samples) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> gauss;
  std::vector<double> s(static_cast<std::size_t>(samples));
  for (double& v : s) v = gauss(rng);
  return s;
}

// 30 s at 128 Hz with the default 33-lag window.
void BM_BuildLaggedMatrix(benchmark::State& state) {
  const auto rec = random_recording(state.range(0), 3840);
  for (auto _ : state) benchmark::DoNotOptimize(aad::build_lagged_matrix(rec, aad::default_lag_spec()));
}
BENCHMARK(BM_BuildLaggedMatrix)->Arg(8)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_NormalEquations(benchmark::State& state) {
  const auto rec = random_recording(state.range(0), 3840);
  const auto design = aad::build_lagged_matrix(rec, aad::default_lag_spec());
  const auto s = random_target(3840);
  for (auto _ : state) benchmark::DoNotOptimize(aad::normal_equations(design, s));
}
BENCHMARK(BM_NormalEquations)->Arg(8)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_SolveRidge(benchmark::State& state) {
  const auto rec = random_recording(state.range(0), 3840);
  const auto eq = aad::normal_equations(aad::build_lagged_matrix(rec, aad::default_lag_spec()),
                                        random_target(3840));
  for (auto _ : state) benchmark::DoNotOptimize(aad::solve_ridge(eq, 10.0));
}
BENCHMARK(BM_SolveRidge)->Arg(8)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Reconstruct(benchmark::State& state) {
  const auto rec = random_recording(state.range(0), 3840);
  aad::Decoder d;
  d.lags = aad::default_lag_spec();
  d.weights = Eigen::MatrixXd::Constant(d.lags.count(), rec.channels(), 0.01);
  for (auto _ : state) benchmark::DoNotOptimize(aad::reconstruct(d, rec));
}
BENCHMARK(BM_Reconstruct)->Arg(8)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_SelectLambda(benchmark::State& state) {
  aad::sim::SimulationConfig cfg;
  cfg.channels = state.range(0);
  cfg.n_training_trials = 10;
  cfg.duration_s = 20.0;
  const auto corpus = aad::sim::generate_training_corpus(cfg, aad::sim::make_trf(cfg));
  const auto grid = aad::default_lambda_grid();
  for (auto _ : state) benchmark::DoNotOptimize(aad::select_lambda(corpus, cfg.lags(), grid));
}
BENCHMARK(BM_SelectLambda)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
