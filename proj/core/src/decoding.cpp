#include "aad/decoding.hpp"

#include "aad/error.hpp"
#include "aad/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace aad {
namespace {

Decoder make_decoder(const Eigen::VectorXd& d, const LagSpec& lags, Eigen::Index channels,
                     double lambda) {
  Decoder decoder;
  decoder.weights = Eigen::Map<const Eigen::MatrixXd>(d.data(), lags.count(), channels);
  decoder.lambda = lambda;
  decoder.lags = lags;
  decoder.rate = lags.rate;
  return decoder;
}

void check_lambda(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InvalidInput("lambda must be finite and >= 0, got " + std::to_string(lambda));
  }
}

// One trial's preliminary decoders, one per λ, sharing a single Gram matrix.
std::vector<Decoder> trial_decoders(const TrainingTrial& trial, std::size_t index,
                                    const LagSpec& lags, std::span<const double> lambdas) {
  if (trial.recording.samples() < lags.count()) {
    throw InsufficientData("trial " + std::to_string(index) + " has " +
                           std::to_string(trial.recording.samples()) + " samples, fewer than " +
                           std::to_string(lags.count()) + " lags");
  }
  const LaggedDesignMatrix design = build_lagged_matrix(trial.recording, lags);
  const NormalEquations eq = normal_equations(design, trial.envelope.samples());
  std::vector<Decoder> out;
  out.reserve(lambdas.size());
  for (const double lambda : lambdas) {
    out.push_back(make_decoder(solve_ridge(eq, lambda), lags, design.channels, lambda));
  }
  return out;
}

}  // namespace

LagSpec LagSpec::from_ms(double tau_min_ms, double tau_max_ms, double rate) {
  if (!(rate > 0.0) || !std::isfinite(tau_min_ms) || !std::isfinite(tau_max_ms)) {
    throw InvalidInput("lag window needs finite bounds and a positive rate");
  }
  const auto to_samples = [rate](double ms) {
    return static_cast<int>(std::lround(ms * rate / 1000.0));
  };
  LagSpec spec;
  spec.tau_min_ms = tau_min_ms;
  spec.tau_max_ms = tau_max_ms;
  spec.rate = rate;
  spec.tau_min = to_samples(tau_min_ms);
  spec.tau_max = to_samples(tau_max_ms);
  if (spec.tau_min > spec.tau_max) {
    throw InvalidInput("lag window is empty: tau_min > tau_max");
  }
  return spec;
}

LagSpec LagSpec::from_samples(int tau_min, int tau_max, double rate) {
  if (!(rate > 0.0)) throw InvalidInput("lag window needs a positive rate");
  if (tau_min > tau_max) throw InvalidInput("lag window is empty: tau_min > tau_max");
  LagSpec spec;
  spec.tau_min = tau_min;
  spec.tau_max = tau_max;
  spec.rate = rate;
  spec.tau_min_ms = tau_min * 1000.0 / rate;
  spec.tau_max_ms = tau_max * 1000.0 / rate;
  return spec;
}

LagSpec default_lag_spec(double rate) { return LagSpec::from_ms(0.0, 250.0, rate); }

Eigen::VectorXd LaggedDesignMatrix::apply(std::span<const double> weights) const {
  if (static_cast<Eigen::Index>(weights.size()) != values.cols()) {
    throw DimensionMismatch("weight vector length does not match design columns");
  }
  Eigen::VectorXd out(values.rows());
  for (Eigen::Index t = 0; t < values.rows(); ++t) {
    double acc = 0.0;
    for (Eigen::Index col = 0; col < values.cols(); ++col) {
      acc += values(t, col) * weights[static_cast<std::size_t>(col)];
    }
    out(t) = acc;
  }
  return out;
}

LaggedDesignMatrix build_lagged_matrix(const MultiChannelRecording& rec, const LagSpec& lags) {
  if (rec.rate != lags.rate) {
    throw DimensionMismatch("recording rate " + std::to_string(rec.rate) +
                            " Hz differs from lag rate " + std::to_string(lags.rate) + " Hz");
  }
  const Eigen::Index n_samples = rec.samples();
  const Eigen::Index n_lags = lags.count();
  if (n_samples < n_lags) {
    throw InsufficientData("recording has " + std::to_string(n_samples) +
                           " samples, fewer than " + std::to_string(n_lags) + " lags");
  }

  LaggedDesignMatrix design;
  design.lags = lags;
  design.channels = rec.channels();
  design.samples = n_samples;
  design.values = Eigen::MatrixXd::Zero(n_samples, rec.channels() * n_lags);
  for (Eigen::Index c = 0; c < rec.channels(); ++c) {
    for (Eigen::Index j = 0; j < n_lags; ++j) {
      const Eigen::Index shift = lags.tau_min + j;
      // rows t with 0 <= t + shift < T
      const Eigen::Index first = std::max<Eigen::Index>(0, -shift);
      const Eigen::Index last = std::min<Eigen::Index>(n_samples, n_samples - shift);
      if (last <= first) continue;
      design.values.col(c * n_lags + j).segment(first, last - first) =
          rec.data.row(c).segment(first + shift, last - first).transpose();
    }
  }
  return design;
}

bool Decoder::operator==(const Decoder& other) const {
  return lambda == other.lambda && lags == other.lags && rate == other.rate &&
         weights.rows() == other.weights.rows() && weights.cols() == other.weights.cols() &&
         weights == other.weights;
}

NormalEquations normal_equations(const LaggedDesignMatrix& design, std::span<const double> target) {
  if (static_cast<Eigen::Index>(target.size()) != design.samples) {
    throw DimensionMismatch("envelope has " + std::to_string(target.size()) +
                            " samples, design matrix " + std::to_string(design.samples));
  }
  const Eigen::Map<const Eigen::VectorXd> s(target.data(), design.samples);
  const Eigen::Index dim = design.values.cols();
  NormalEquations eq;
  eq.gram = Eigen::MatrixXd::Zero(dim, dim);
  eq.gram.selfadjointView<Eigen::Lower>().rankUpdate(design.values.transpose());
  eq.gram.triangularView<Eigen::StrictlyUpper>() = eq.gram.transpose();
  eq.rhs = design.values.transpose() * s;
  return eq;
}

Eigen::VectorXd solve_ridge(const NormalEquations& eq, double lambda) {
  check_lambda(lambda);
  Eigen::MatrixXd system = eq.gram;
  system.diagonal().array() += lambda;

  const Eigen::LLT<Eigen::MatrixXd, Eigen::Lower> llt(system);
  if (llt.info() != Eigen::Success) {
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(system);
    const double pivot = ldlt.vectorD().minCoeff();
    throw SingularSystem("normal equations are not positive definite (lambda = " +
                             std::to_string(lambda) + ", smallest pivot = " +
                             std::to_string(pivot) + ")",
                         pivot);
  }
  const Eigen::VectorXd pivots = llt.matrixLLT().diagonal().array().square();
  const double smallest = pivots.minCoeff();
  const double largest = pivots.maxCoeff();
  const double tolerance = static_cast<double>(pivots.size()) *
                           std::numeric_limits<double>::epsilon() * largest;
  if (!(smallest > tolerance)) {
    throw SingularSystem("normal equations are numerically singular (lambda = " +
                             std::to_string(lambda) + ", smallest pivot = " +
                             std::to_string(smallest) + ")",
                         smallest);
  }
  return llt.solve(eq.rhs);
}

FitDiagnostics fit_diagnostics(const LaggedDesignMatrix& design, std::span<const double> target,
                               std::span<const double> weights, double lambda) {
  const Eigen::Map<const Eigen::VectorXd> s(target.data(), static_cast<Eigen::Index>(target.size()));
  const Eigen::Map<const Eigen::VectorXd> d(weights.data(), static_cast<Eigen::Index>(weights.size()));
  const Eigen::VectorXd residual = s - design.values * d;
  const double n = static_cast<double>(design.samples);
  FitDiagnostics diag;
  diag.regularized_mse = (residual.squaredNorm() + lambda * d.squaredNorm()) / n;
  diag.residual_gradient_norm =
      ((2.0 / n) * (lambda * d - design.values.transpose() * residual)).norm();
  return diag;
}

FitResult fit_decoder(const LaggedDesignMatrix& design, const Envelope& target, double lambda) {
  check_lambda(lambda);
  const NormalEquations eq = normal_equations(design, target.samples());
  const Eigen::VectorXd d = solve_ridge(eq, lambda);
  FitResult result;
  result.decoder = make_decoder(d, design.lags, design.channels, lambda);
  result.diagnostics = fit_diagnostics(design, target.samples(), result.decoder.vec(), lambda);
  return result;
}

Envelope reconstruct(const Decoder& decoder, const MultiChannelRecording& rec) {
  if (rec.channels() != decoder.channels()) {
    throw DimensionMismatch("recording has " + std::to_string(rec.channels()) +
                            " channels, decoder expects " + std::to_string(decoder.channels()));
  }
  if (rec.rate != decoder.rate) {
    throw DimensionMismatch("recording rate " + std::to_string(rec.rate) +
                            " Hz differs from decoder rate " + std::to_string(decoder.rate) + " Hz");
  }
  if (decoder.lag_count() != decoder.lags.count()) {
    throw DimensionMismatch("decoder weights do not match its lag window");
  }

  const Eigen::Index n_samples = rec.samples();
  const Eigen::Index n_lags = decoder.lag_count();
  const int tau_min = decoder.lags.tau_min;
  Envelope out{{std::vector<double>(static_cast<std::size_t>(n_samples), 0.0), rec.rate}, false, false};
  for (Eigen::Index t = 0; t < n_samples; ++t) {
    // Same accumulation order as LaggedDesignMatrix::apply; skipped terms are
    // the zero-padded entries, which contribute exactly nothing.
    const Eigen::Index j_begin = std::max<Eigen::Index>(0, -(t + tau_min));
    const Eigen::Index j_end = std::min<Eigen::Index>(n_lags, n_samples - (t + tau_min));
    double acc = 0.0;
    for (Eigen::Index c = 0; c < rec.channels(); ++c) {
      const double* row = rec.data.row(c).data();
      const double* w = decoder.weights.col(c).data();
      const Eigen::Index offset = t + tau_min;
      for (Eigen::Index j = j_begin; j < j_end; ++j) acc += row[offset + j] * w[j];
    }
    out.signal.samples[static_cast<std::size_t>(t)] = acc;
  }
  return out;
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DimensionMismatch("pearson: sequences differ in length (" + std::to_string(a.size()) +
                            " vs " + std::to_string(b.size()) + ")");
  }
  if (a.size() < 2) throw InvalidInput("pearson: need at least two samples");
  const auto constant = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
  };
  if (constant(a) || constant(b)) {
    throw UndefinedCorrelation("pearson: correlation with a constant sequence is undefined");
  }

  const double n = static_cast<double>(a.size());
  double mean_a = 0.0;
  double mean_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    mean_a += a[i];
    mean_b += b[i];
  }
  mean_a /= n;
  mean_b /= n;
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - mean_a;
    const double db = b[i] - mean_b;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) {
    throw UndefinedCorrelation("pearson: zero variance");
  }
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

void TrainingCorpus::validate() const {
  if (trials.empty()) throw InsufficientData("training corpus is empty");
  const auto& first = trials.front().recording;
  for (std::size_t k = 0; k < trials.size(); ++k) {
    const auto& trial = trials[k];
    trial.recording.validate();
    const std::string name = "trial " + std::to_string(k);
    if (static_cast<Eigen::Index>(trial.envelope.size()) != trial.recording.samples()) {
      throw DimensionMismatch(name + ": envelope and recording lengths differ");
    }
    if (trial.envelope.rate() != trial.recording.rate) {
      throw DimensionMismatch(name + ": envelope and recording rates differ");
    }
    if (trial.recording.channels() != first.channels() || trial.recording.rate != first.rate) {
      throw DimensionMismatch(name + ": channel count or rate differs from trial 0");
    }
  }
}

std::vector<Decoder> preliminary_decoders(const TrainingCorpus& corpus, const LagSpec& lags,
                                          double lambda) {
  check_lambda(lambda);
  corpus.validate();
  if (corpus.size() < 2) throw InsufficientData("preliminary decoders need K >= 2 trials");
  std::vector<Decoder> prelims(corpus.size());
  const double grid[] = {lambda};
  parallel_for(corpus.size(), [&](std::size_t k) {
    prelims[k] = std::move(trial_decoders(corpus.trials[k], k, lags, grid).front());
  });
  return prelims;
}

Decoder loo_decoder(std::span<const Decoder> prelims, std::size_t k) {
  const std::size_t count = prelims.size();
  if (count < 2) throw InsufficientData("leave-one-out needs K >= 2 preliminary decoders");
  if (k >= count) {
    throw InvalidInput("leave-one-out index " + std::to_string(k) + " out of range for K = " +
                       std::to_string(count));
  }
  const Decoder& ref = prelims.front();
  Decoder out;
  out.lambda = ref.lambda;
  out.lags = ref.lags;
  out.rate = ref.rate;
  out.weights = Eigen::MatrixXd::Zero(ref.weights.rows(), ref.weights.cols());
  for (std::size_t i = 0; i < count; ++i) {
    if (i == k) continue;
    if (prelims[i].weights.rows() != ref.weights.rows() ||
        prelims[i].weights.cols() != ref.weights.cols()) {
      throw DimensionMismatch("preliminary decoders differ in shape");
    }
    out.weights += prelims[i].weights;
  }
  out.weights /= static_cast<double>(count - 1);
  return out;
}

LambdaEvaluation evaluate_prelims(const TrainingCorpus& corpus, std::span<const Decoder> prelims) {
  if (prelims.size() != corpus.size()) {
    throw DimensionMismatch("need one preliminary decoder per trial");
  }
  const std::size_t count = corpus.size();
  LambdaEvaluation eval;
  eval.lambda = prelims.empty() ? 0.0 : prelims.front().lambda;
  eval.trial_r.assign(count, 0.0);
  eval.undefined.assign(count, false);
  std::vector<char> undefined(count, 0);
  parallel_for(count, [&](std::size_t k) {
    const Decoder decoder = loo_decoder(prelims, k);
    const Envelope estimate = reconstruct(decoder, corpus.trials[k].recording);
    try {
      eval.trial_r[k] = pearson(estimate.samples(), corpus.trials[k].envelope.samples());
    } catch (const UndefinedCorrelation&) {
      eval.trial_r[k] = 0.0;
      undefined[k] = 1;
    }
  });
  double sum = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    sum += eval.trial_r[k];
    eval.undefined[k] = undefined[k] != 0;
  }
  eval.mean_r = sum / static_cast<double>(count);
  return eval;
}

LambdaEvaluation evaluate_lambda(const TrainingCorpus& corpus, const LagSpec& lags, double lambda) {
  const std::vector<Decoder> prelims = preliminary_decoders(corpus, lags, lambda);
  LambdaEvaluation eval = evaluate_prelims(corpus, prelims);
  eval.lambda = lambda;
  return eval;
}

std::vector<double> default_lambda_grid() {
  return {1e-3, 1e-2, 1e-1, 1e0, 1e1, 1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8, 1e9, 1e10, 1e11};
}

CrossValidationReport select_lambda(const TrainingCorpus& corpus, const LagSpec& lags,
                                    std::span<const double> grid) {
  if (grid.empty()) throw InvalidInput("lambda grid is empty");
  for (std::size_t g = 0; g < grid.size(); ++g) {
    check_lambda(grid[g]);
    if (g > 0 && !(grid[g] > grid[g - 1])) {
      throw InvalidInput("lambda grid must be strictly increasing");
    }
  }
  corpus.validate();
  if (corpus.size() < 2) throw InsufficientData("cross-validation needs K >= 2 trials");

  const std::size_t count = corpus.size();
  // by_trial[k][g]: preliminary decoder of trial k at grid[g].
  std::vector<std::vector<Decoder>> by_trial(count);
  parallel_for(count, [&](std::size_t k) {
    by_trial[k] = trial_decoders(corpus.trials[k], k, lags, grid);
  });

  CrossValidationReport report;
  report.grid.assign(grid.begin(), grid.end());
  report.trial_r.assign(count, std::vector<double>(grid.size(), 0.0));
  report.undefined.assign(count, std::vector<bool>(grid.size(), false));
  std::vector<Decoder> prelims(count);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    for (std::size_t k = 0; k < count; ++k) prelims[k] = std::move(by_trial[k][g]);
    const LambdaEvaluation eval = evaluate_prelims(corpus, prelims);
    report.mean_r.push_back(eval.mean_r);
    for (std::size_t k = 0; k < count; ++k) {
      report.trial_r[k][g] = eval.trial_r[k];
      report.undefined[k][g] = eval.undefined[k];
    }
  }

  for (std::size_t g = 1; g < grid.size(); ++g) {
    if (report.mean_r[g] > report.mean_r[report.selected_index]) report.selected_index = g;
  }
  report.selected_lambda = report.grid[report.selected_index];
  return report;
}

Decoder fit_final_decoder(const TrainingCorpus& corpus, const LagSpec& lags, double lambda,
                          FinalFit method) {
  check_lambda(lambda);
  corpus.validate();
  const double grid[] = {lambda};

  if (method == FinalFit::AveragePrelims) {
    std::vector<Decoder> prelims(corpus.size());
    parallel_for(corpus.size(), [&](std::size_t k) {
      prelims[k] = std::move(trial_decoders(corpus.trials[k], k, lags, grid).front());
    });
    Decoder mean = prelims.front();
    mean.weights.setZero();
    for (const Decoder& d : prelims) mean.weights += d.weights;
    mean.weights /= static_cast<double>(prelims.size());
    return mean;
  }

  NormalEquations total;
  Eigen::Index channels = 0;
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const auto& trial = corpus.trials[k];
    if (trial.recording.samples() < lags.count()) {
      throw InsufficientData("trial " + std::to_string(k) + " is shorter than the lag window");
    }
    const LaggedDesignMatrix design = build_lagged_matrix(trial.recording, lags);
    channels = design.channels;
    NormalEquations eq = normal_equations(design, trial.envelope.samples());
    if (k == 0) {
      total = std::move(eq);
    } else {
      total.gram += eq.gram;
      total.rhs += eq.rhs;
    }
  }
  return make_decoder(solve_ridge(total, lambda), lags, channels, lambda);
}

}  // namespace aad
