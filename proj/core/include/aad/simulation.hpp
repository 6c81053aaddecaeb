#pragma once

#include "aad/attention.hpp"
#include "aad/decoding.hpp"
#include "aad/signal.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace aad::sim {

// Independent seed for (base seed, stream, index). Every random draw in the
// simulator comes from a generator seeded this way, so trials can be
// generated in any order or in parallel.
enum class Stream : std::uint64_t {
  Trf = 1,
  TrainEnvelope = 2,
  TrainNoise = 3,
  TestEnvelope = 4,
  TestNoise = 5,
};
std::uint64_t derive_seed(std::uint64_t base, Stream stream, std::uint64_t index);

// Forward kernels: channel n responds to a stimulus through kernels.row(n).
struct ForwardTRF {
  Eigen::MatrixXd kernels;  // channels × kernel length
  double rate = kWorkingRate;
  std::uint64_t seed = 0;
};

// Smoothed random kernels with an exponential decay over [0, length_ms],
// each scaled to unit energy.
ForwardTRF make_trf(Eigen::Index channels, double rate, double length_ms, std::uint64_t seed);

// Random envelope with energy only in 0.3–30 Hz (low frequencies weighted
// up), min-max normalized to [0, 1]. round(duration_s·rate) samples.
Envelope gen_envelope(double duration_s, double rate, std::uint64_t seed);

struct MixingParams {
  double leakage = 0.0;  // gain of unattended streams, in [0, 1]
  double snr_db = 20.0;  // +inf: no noise; −inf: noise only
  std::uint64_t noise_seed = 0;
};

// channel n = attended * k_n + leakage·Σ_j unattended_j * shift_j(k_n) + noise.
// shift_j circularly rotates the kernel by (j+1)·L/(J+1) taps. The noise is
// white Gaussian scaled so that the variance ratio of the noiseless mix to the
// noise is exactly snr_db.
MultiChannelRecording synthesize_recording(const Envelope& attended,
                                           std::span<const Envelope> unattended,
                                           const ForwardTRF& trf, const MixingParams& mix);

struct SimulationConfig {
  Eigen::Index channels = 64;
  double duration_s = 30.0;
  double rate = kWorkingRate;
  double snr_db = 20.0;
  double leakage = 0.2;
  std::uint64_t seed = 1;
  std::size_t n_training_trials = 20;
  std::size_t n_test_trials = 18;
  double trf_length_ms = 250.0;
  double tau_min_ms = 0.0;
  double tau_max_ms = 250.0;
  std::vector<double> lambda_grid = default_lambda_grid();
  FinalFit final_fit = FinalFit::Joint;

  void validate() const;
  LagSpec lags() const { return LagSpec::from_ms(tau_min_ms, tau_max_ms, rate); }
};

ForwardTRF make_trf(const SimulationConfig& cfg);

// Single-talker training session: recordings driven by one envelope each.
TrainingCorpus generate_training_corpus(const SimulationConfig& cfg, const ForwardTRF& trf);

// Three-talker trials. Trial i cycles through the 18 layout × gender × level
// combinations: level = i mod 3, gender = (i / 3) mod 2, layout = (i / 6) mod 3.
std::vector<CocktailTrial> generate_test_trials(const SimulationConfig& cfg, const ForwardTRF& trf);

struct ExperimentResult {
  CrossValidationReport cv;
  Decoder decoder;
  std::vector<AttentionResult> results;
  AccuracySummary summary;
};

// Train on a simulated single-talker session (λ by leave-one-out over the
// grid, then the final fit), then classify the simulated test trials.
ExperimentResult run_experiment(const SimulationConfig& cfg);

}  // namespace aad::sim
