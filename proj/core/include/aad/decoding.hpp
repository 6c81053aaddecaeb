#pragma once

#include "aad/signal.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace aad {

// Window of time lags the decoder integrates over. A lag τ pairs the
// stimulus at time t with the response at t + τ, so positive lags look at
// the response that follows the stimulus.
struct LagSpec {
  double tau_min_ms = 0.0;
  double tau_max_ms = 250.0;
  double rate = kWorkingRate;
  int tau_min = 0;   // samples at `rate`
  int tau_max = 32;  // samples at `rate`

  // Lags rounded to the nearest sample at `rate`.
  static LagSpec from_ms(double tau_min_ms, double tau_max_ms, double rate = kWorkingRate);
  static LagSpec from_samples(int tau_min, int tau_max, double rate = kWorkingRate);

  int count() const noexcept { return tau_max - tau_min + 1; }
  bool operator==(const LagSpec&) const = default;
};

// 0–250 ms at 128 Hz: 33 lags.
LagSpec default_lag_spec(double rate = kWorkingRate);

// T × (N·L) matrix; column c·L + j holds channel c at lag tau_min + j:
//   values(t, c·L + j) = r(t + tau_min + j, c), or 0 outside the recording.
struct LaggedDesignMatrix {
  Eigen::MatrixXd values;
  LagSpec lags;
  Eigen::Index channels = 0;
  Eigen::Index samples = 0;

  // values · w, accumulated per row in column order.
  Eigen::VectorXd apply(std::span<const double> weights) const;
};

LaggedDesignMatrix build_lagged_matrix(const MultiChannelRecording& rec, const LagSpec& lags);

// Linear backward model: weights(j, c) multiplies channel c at lag tau_min + j.
struct Decoder {
  Eigen::MatrixXd weights;  // L × N
  double lambda = 0.0;
  LagSpec lags;
  double rate = kWorkingRate;

  Eigen::Index lag_count() const noexcept { return weights.rows(); }
  Eigen::Index channels() const noexcept { return weights.cols(); }
  // Weights in design-matrix column order (c·L + j).
  std::span<const double> vec() const noexcept {
    return {weights.data(), static_cast<std::size_t>(weights.size())};
  }
  bool operator==(const Decoder& other) const;
};

struct FitDiagnostics {
  double regularized_mse = 0.0;         // (‖s − R·d‖² + λ‖d‖²) / T
  double residual_gradient_norm = 0.0;  // ‖∇ of the above at d‖₂
};

struct FitResult {
  Decoder decoder;
  FitDiagnostics diagnostics;
};

// Gram matrix RᵀR and right-hand side Rᵀs of one trial.
struct NormalEquations {
  Eigen::MatrixXd gram;
  Eigen::VectorXd rhs;
};

NormalEquations normal_equations(const LaggedDesignMatrix& design, std::span<const double> target);

// Solves (G + λI)d = b by Cholesky factorization. Throws SingularSystem when
// the factorization fails or its smallest pivot is negligible.
Eigen::VectorXd solve_ridge(const NormalEquations& eq, double lambda);

FitDiagnostics fit_diagnostics(const LaggedDesignMatrix& design, std::span<const double> target,
                               std::span<const double> weights, double lambda);

FitResult fit_decoder(const LaggedDesignMatrix& design, const Envelope& target, double lambda);

// ŝ(t) = Σ_c Σ_j r(t + tau_min + j, c)·weights(j, c), zero outside the
// recording. Not normalized.
Envelope reconstruct(const Decoder& decoder, const MultiChannelRecording& rec);

// Sample Pearson correlation. Throws UndefinedCorrelation if either input
// is constant.
double pearson(std::span<const double> a, std::span<const double> b);

struct TrainingTrial {
  MultiChannelRecording recording;
  Envelope envelope;
};

struct TrainingCorpus {
  std::vector<TrainingTrial> trials;

  std::size_t size() const noexcept { return trials.size(); }
  // Equal lengths per trial; shared channel count and rate.
  void validate() const;
};

std::vector<Decoder> preliminary_decoders(const TrainingCorpus& corpus, const LagSpec& lags,
                                          double lambda);

// Mean of all preliminary decoders except index k (0-based): summed in index
// order, then divided by K − 1.
Decoder loo_decoder(std::span<const Decoder> prelims, std::size_t k);

struct LambdaEvaluation {
  double lambda = 0.0;
  double mean_r = 0.0;
  std::vector<double> trial_r;     // one per trial; 0 where undefined
  std::vector<bool> undefined;     // Pearson undefined for that trial
};

// Leave-one-out evaluation of one λ from precomputed preliminary decoders.
LambdaEvaluation evaluate_prelims(const TrainingCorpus& corpus, std::span<const Decoder> prelims);

LambdaEvaluation evaluate_lambda(const TrainingCorpus& corpus, const LagSpec& lags, double lambda);

// 10^-3, 10^-2, …, 10^11.
std::vector<double> default_lambda_grid();

struct CrossValidationReport {
  std::vector<double> grid;
  std::vector<double> mean_r;                      // per λ
  std::vector<std::vector<double>> trial_r;        // K × |grid|
  std::vector<std::vector<bool>> undefined;        // K × |grid|
  double selected_lambda = 0.0;
  std::size_t selected_index = 0;
};

// Evaluates every λ; picks the largest mean r, ties going to the smallest λ.
CrossValidationReport select_lambda(const TrainingCorpus& corpus, const LagSpec& lags,
                                    std::span<const double> grid);

enum class FinalFit {
  Joint,              // one ridge fit on all trials stacked
  AveragePrelims,     // mean of the per-trial decoders
};

Decoder fit_final_decoder(const TrainingCorpus& corpus, const LagSpec& lags, double lambda,
                          FinalFit method = FinalFit::Joint);

}  // namespace aad
