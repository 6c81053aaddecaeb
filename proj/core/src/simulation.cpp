#include "aad/simulation.hpp"

#include "aad/error.hpp"
#include "aad/fft.hpp"
#include "aad/parallel.hpp"

#include <cmath>
#include <algorithm>
#include <complex>
#include <limits>
#include <random>
#include <string>

namespace aad::sim {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::mt19937_64 make_rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  return std::mt19937_64(seq);
}

double centred_power(const double* x, Eigen::Index n) {
  double mean = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) mean += x[i];
  mean /= static_cast<double>(n);
  double power = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) power += (x[i] - mean) * (x[i] - mean);
  return power / static_cast<double>(n);
}

// Causal FIR: y(t) += gain · Σ_k h(k)·s(t − k).
void convolve_into(std::span<const double> s, const Eigen::RowVectorXd& h, double gain,
                   double* y) {
  const Eigen::Index n = static_cast<Eigen::Index>(s.size());
  for (Eigen::Index t = 0; t < n; ++t) {
    double acc = 0.0;
    const Eigen::Index k_end = std::min<Eigen::Index>(h.size(), t + 1);
    for (Eigen::Index k = 0; k < k_end; ++k) acc += h(k) * s[static_cast<std::size_t>(t - k)];
    y[t] += gain * acc;
  }
}

constexpr const char* kGenders[] = {"F", "M"};

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, Stream stream, std::uint64_t index) {
  std::uint64_t x = splitmix64(base);
  x = splitmix64(x ^ static_cast<std::uint64_t>(stream));
  return splitmix64(x ^ index);
}

ForwardTRF make_trf(Eigen::Index channels, double rate, double length_ms, std::uint64_t seed) {
  if (channels < 1) throw InvalidInput("make_trf: need at least one channel");
  if (!(rate > 0.0) || !(length_ms >= 0.0)) throw InvalidInput("make_trf: bad rate or length");
  const auto taps = static_cast<Eigen::Index>(std::lround(length_ms * rate / 1000.0)) + 1;
  constexpr double kDecaySeconds = 0.1;

  std::mt19937_64 rng = make_rng(derive_seed(seed, Stream::Trf, 0));
  std::normal_distribution<double> normal;
  ForwardTRF trf;
  trf.rate = rate;
  trf.seed = seed;
  trf.kernels.resize(channels, taps);
  Eigen::RowVectorXd raw(taps);
  for (Eigen::Index c = 0; c < channels; ++c) {
    for (Eigen::Index k = 0; k < taps; ++k) {
      raw(k) = normal(rng) * std::exp(-static_cast<double>(k) / rate / kDecaySeconds);
    }
    for (Eigen::Index k = 0; k < taps; ++k) {
      const double left = k > 0 ? raw(k - 1) : 0.0;
      const double right = k + 1 < taps ? raw(k + 1) : 0.0;
      trf.kernels(c, k) = 0.25 * left + 0.5 * raw(k) + 0.25 * right;
    }
    const double norm = trf.kernels.row(c).norm();
    if (norm > 0.0) trf.kernels.row(c) /= norm;
  }
  return trf;
}

Envelope gen_envelope(double duration_s, double rate, std::uint64_t seed) {
  if (!(duration_s > 0.0) || !std::isfinite(duration_s)) {
    throw InvalidInput("gen_envelope: duration must be positive");
  }
  const BandSpec band;
  band.validate_for(rate);
  const auto n = static_cast<std::size_t>(std::llround(duration_s * rate));
  if (n < 2) throw InvalidInput("gen_envelope: duration too short for the rate");

  // Speech-like modulation spectrum: flat below ~4 Hz, falling as 1/f above.
  constexpr double kCornerHz = 4.0;
  std::mt19937_64 rng = make_rng(seed);
  std::normal_distribution<double> normal;
  std::vector<std::complex<double>> spectrum(n / 2 + 1);
  for (std::size_t k = 1; k < spectrum.size(); ++k) {
    const double f = static_cast<double>(k) * rate / static_cast<double>(n);
    const double re = normal(rng);
    const double im = normal(rng);
    if (f < band.low_hz || f > band.high_hz) continue;
    const double gain = 1.0 / std::sqrt(1.0 + (f / kCornerHz) * (f / kCornerHz));
    spectrum[k] = {gain * re, gain * im};
  }
  const std::vector<double> x = fft::inverse_real(spectrum, n);
  return normalize_unit_interval({x, rate});
}

MultiChannelRecording synthesize_recording(const Envelope& attended,
                                           std::span<const Envelope> unattended,
                                           const ForwardTRF& trf, const MixingParams& mix) {
  attended.signal.validate();
  if (attended.rate() != trf.rate) {
    throw DimensionMismatch("envelope rate differs from the forward model rate");
  }
  for (const Envelope& u : unattended) {
    if (u.size() != attended.size() || u.rate() != attended.rate()) {
      throw DimensionMismatch("unattended envelope length or rate differs from the attended one");
    }
  }
  if (!(mix.leakage >= 0.0 && mix.leakage <= 1.0)) {
    throw InvalidInput("leakage must lie in [0, 1]");
  }
  if (std::isnan(mix.snr_db)) throw InvalidInput("snr_db is NaN");

  const Eigen::Index channels = trf.kernels.rows();
  const Eigen::Index taps = trf.kernels.cols();
  const auto n = static_cast<Eigen::Index>(attended.size());
  MultiChannelRecording rec;
  rec.rate = attended.rate();
  rec.data = ChannelMatrix::Zero(channels, n);

  const bool noise_only = mix.snr_db == -std::numeric_limits<double>::infinity();
  if (!noise_only) {
    const auto streams = static_cast<Eigen::Index>(unattended.size());
    for (Eigen::Index c = 0; c < channels; ++c) {
      const Eigen::RowVectorXd kernel = trf.kernels.row(c);
      double* y = rec.data.row(c).data();
      convolve_into(attended.samples(), kernel, 1.0, y);
      if (mix.leakage == 0.0) continue;
      for (Eigen::Index j = 0; j < streams; ++j) {
        const Eigen::Index shift = (j + 1) * taps / (streams + 1);
        Eigen::RowVectorXd shifted(taps);
        for (Eigen::Index k = 0; k < taps; ++k) shifted((k + shift) % taps) = kernel(k);
        convolve_into(unattended[static_cast<std::size_t>(j)].samples(), shifted, mix.leakage, y);
      }
    }
  }

  if (mix.snr_db == std::numeric_limits<double>::infinity()) return rec;

  std::mt19937_64 rng = make_rng(mix.noise_seed);
  std::normal_distribution<double> normal;
  ChannelMatrix noise(channels, n);
  for (Eigen::Index c = 0; c < channels; ++c) {
    for (Eigen::Index t = 0; t < n; ++t) noise(c, t) = normal(rng);
  }
  for (Eigen::Index c = 0; c < channels; ++c) {
    double target_power = 1.0;
    if (!noise_only) {
      target_power = centred_power(rec.data.row(c).data(), n) * std::pow(10.0, -mix.snr_db / 10.0);
    }
    const double current = centred_power(noise.row(c).data(), n);
    const double scale = current > 0.0 ? std::sqrt(target_power / current) : 0.0;
    rec.data.row(c) += scale * noise.row(c);
  }
  return rec;
}

void SimulationConfig::validate() const {
  if (channels < 1) throw ConfigError("channels must be >= 1");
  if (!(duration_s > 0.0) || !std::isfinite(duration_s)) throw ConfigError("duration_s must be > 0");
  BandSpec{}.validate_for(rate);
  if (std::isnan(snr_db)) throw ConfigError("snr_db must not be NaN");
  if (!(leakage >= 0.0 && leakage <= 1.0)) throw ConfigError("leakage must lie in [0, 1]");
  if (n_training_trials < 2) throw ConfigError("n_training_trials must be >= 2");
  if (n_test_trials < 1) throw ConfigError("n_test_trials must be >= 1");
  if (!(trf_length_ms >= 0.0)) throw ConfigError("trf_length_ms must be >= 0");
  const LagSpec spec = lags();
  if (std::llround(duration_s * rate) < spec.count()) {
    throw ConfigError("duration is shorter than the lag window");
  }
  if (lambda_grid.empty()) throw ConfigError("lambda grid is empty");
}

ForwardTRF make_trf(const SimulationConfig& cfg) {
  return make_trf(cfg.channels, cfg.rate, cfg.trf_length_ms, cfg.seed);
}

TrainingCorpus generate_training_corpus(const SimulationConfig& cfg, const ForwardTRF& trf) {
  cfg.validate();
  TrainingCorpus corpus;
  corpus.trials.resize(cfg.n_training_trials);
  parallel_for(cfg.n_training_trials, [&](std::size_t k) {
    Envelope env = gen_envelope(cfg.duration_s, cfg.rate, derive_seed(cfg.seed, Stream::TrainEnvelope, k));
    const MixingParams mix{cfg.leakage, cfg.snr_db, derive_seed(cfg.seed, Stream::TrainNoise, k)};
    corpus.trials[k].recording = synthesize_recording(env, {}, trf, mix);
    corpus.trials[k].envelope = std::move(env);
  });
  return corpus;
}

std::vector<CocktailTrial> generate_test_trials(const SimulationConfig& cfg, const ForwardTRF& trf) {
  cfg.validate();
  std::vector<CocktailTrial> trials(cfg.n_test_trials);
  parallel_for(cfg.n_test_trials, [&](std::size_t i) {
    CocktailTrial& trial = trials[i];
    for (std::size_t s = 0; s < kStreamCount; ++s) {
      trial.candidates[s] = gen_envelope(cfg.duration_s, cfg.rate,
                                         derive_seed(cfg.seed, Stream::TestEnvelope, kStreamCount * i + s));
    }
    const MixingParams mix{cfg.leakage, cfg.snr_db, derive_seed(cfg.seed, Stream::TestNoise, i)};
    trial.recording = synthesize_recording(
        trial.candidates[0], std::span<const Envelope>(trial.candidates).subspan(1), trf, mix);
    trial.true_target = 0;
    trial.metadata.level_id = static_cast<int>(i % 3);
    trial.metadata.target_gender = kGenders[(i / 3) % 2];
    trial.metadata.layout_id = static_cast<int>((i / 6) % 3);
  });
  return trials;
}

ExperimentResult run_experiment(const SimulationConfig& cfg) {
  cfg.validate();
  const ForwardTRF trf = make_trf(cfg);
  const LagSpec lags = cfg.lags();

  ExperimentResult out;
  {
    const TrainingCorpus corpus = generate_training_corpus(cfg, trf);
    out.cv = select_lambda(corpus, lags, cfg.lambda_grid);
    out.decoder = fit_final_decoder(corpus, lags, out.cv.selected_lambda, cfg.final_fit);
  }
  const std::vector<CocktailTrial> trials = generate_test_trials(cfg, trf);
  out.results.resize(trials.size());
  parallel_for(trials.size(), [&](std::size_t i) {
    out.results[i] = detect_attention(out.decoder, trials[i]);
  });
  out.summary = detection_accuracy(out.results);
  return out;
}

}  // namespace aad::sim
