#include "aad/signal.hpp"

#include "aad/error.hpp"
#include "aad/fft.hpp"
#include "aad/iir.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace aad {
namespace {

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double s) { return std::isfinite(s); });
}

bool is_integral(double v) { return std::abs(v - std::round(v)) <= 1e-9 * std::max(1.0, std::abs(v)); }

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

// Low-pass prototype for resample(): windowed sinc with cutoff 1/max(up,down)
// of the upsampled Nyquist, unit DC gain, scaled by up.
std::vector<double> resample_filter(const ResampleRatio& ratio) {
  const long max_factor = std::max(ratio.up, ratio.down);
  const long half_len = 10 * max_factor;
  const long taps = 2 * half_len + 1;
  const double cutoff = 1.0 / static_cast<double>(max_factor);
  constexpr double kBeta = 5.0;
  const double i0_beta = std::cyl_bessel_i(0.0, kBeta);

  std::vector<double> h(static_cast<std::size_t>(taps));
  for (long i = 0; i < taps; ++i) {
    const double offset = static_cast<double>(i - half_len);
    const double r = offset / static_cast<double>(half_len);
    const double window = std::cyl_bessel_i(0.0, kBeta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0_beta;
    h[static_cast<std::size_t>(i)] = cutoff * sinc(cutoff * offset) * window;
  }
  const double sum = std::accumulate(h.begin(), h.end(), 0.0);
  for (double& tap : h) tap = tap / sum * static_cast<double>(ratio.up);
  return h;
}

}  // namespace

void SampledSignal::validate() const {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw InvalidInput("signal rate must be positive and finite");
  }
  if (samples.empty()) throw InvalidInput("signal must hold at least one sample");
  if (!all_finite(samples)) throw InvalidInput("signal contains non-finite samples");
}

SampledSignal MultiChannelRecording::channel(Eigen::Index c) const {
  const auto row = data.row(c);
  return {std::vector<double>(row.begin(), row.end()), rate};
}

void MultiChannelRecording::validate() const {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw InvalidInput("recording rate must be positive and finite");
  }
  if (data.rows() == 0 || data.cols() == 0) throw InvalidInput("recording is empty");
  if (!data.allFinite()) throw InvalidInput("recording contains non-finite values");
  if (!channel_labels.empty() && static_cast<Eigen::Index>(channel_labels.size()) != data.rows()) {
    throw InvalidInput("recording has " + std::to_string(channel_labels.size()) +
                       " labels for " + std::to_string(data.rows()) + " channels");
  }
}

bool MultiChannelRecording::operator==(const MultiChannelRecording& other) const {
  return rate == other.rate && channel_labels == other.channel_labels &&
         data.rows() == other.data.rows() && data.cols() == other.data.cols() &&
         data == other.data;
}

void BandSpec::validate_for(double rate) const {
  if (!(low_hz > 0.0) || !(low_hz < high_hz) || !(high_hz < rate / 2.0)) {
    throw InvalidBand("band " + std::to_string(low_hz) + "-" + std::to_string(high_hz) +
                      " Hz is not inside (0, " + std::to_string(rate / 2.0) + ") Hz");
  }
}

SampledSignal analytic_envelope(const SampledSignal& x) {
  x.validate();
  if (x.size() < 2) throw InvalidInput("analytic_envelope needs at least 2 samples");
  const auto z = fft::analytic_signal(x.samples);
  SampledSignal out{std::vector<double>(z.size()), x.rate};
  std::transform(z.begin(), z.end(), out.samples.begin(),
                 [](const std::complex<double>& v) { return std::abs(v); });
  return out;
}

std::size_t bandpass_padding(const BandSpec& band, double rate) {
  // At least three times the overall (forward) order; long enough to cover
  // about one period of the low edge.
  const auto by_order = static_cast<std::size_t>(3 * 2 * kBandpassOrder);
  const auto by_period = static_cast<std::size_t>(std::ceil(rate / band.low_hz));
  return std::max(by_order, by_period);
}

SampledSignal bandpass_zero_phase(const SampledSignal& x, const BandSpec& band) {
  x.validate();
  band.validate_for(x.rate);
  const auto sos = iir::butterworth_bandpass(kBandpassOrder, band.low_hz, band.high_hz, x.rate);
  return {iir::filtfilt(x.samples, sos, bandpass_padding(band, x.rate)), x.rate};
}

ResampleRatio resample_ratio(double source_rate, double target_rate) {
  if (!(source_rate > 0.0) || !(target_rate > 0.0) || !std::isfinite(source_rate) ||
      !std::isfinite(target_rate)) {
    throw InvalidInput("resample: rates must be positive and finite");
  }
  double scale = 1.0;
  for (int digits = 0; digits <= 6; ++digits, scale *= 10.0) {
    const double s = source_rate * scale;
    const double t = target_rate * scale;
    if (is_integral(s) && is_integral(t)) {
      const auto si = static_cast<long>(std::llround(s));
      const auto ti = static_cast<long>(std::llround(t));
      const long g = std::gcd(si, ti);
      return {ti / g, si / g};
    }
  }
  throw InvalidInput("resample: rates " + std::to_string(source_rate) + " and " +
                     std::to_string(target_rate) + " have no rational ratio");
}

SampledSignal resample(const SampledSignal& x, double target_rate) {
  x.validate();
  const ResampleRatio ratio = resample_ratio(x.rate, target_rate);
  if (ratio.up == ratio.down) return {x.samples, target_rate};

  const auto h = resample_filter(ratio);
  const long half_len = (static_cast<long>(h.size()) - 1) / 2;
  const long n_in = static_cast<long>(x.size());
  const long n_out = (n_in * ratio.up + ratio.down - 1) / ratio.down;

  // y[m] = sum_k h[k]·u[half_len + m·down − k], u the zero-stuffed input;
  // only taps landing on u[j·up] contribute.
  SampledSignal y{std::vector<double>(static_cast<std::size_t>(n_out), 0.0), target_rate};
  const long taps = static_cast<long>(h.size());
  for (long m = 0; m < n_out; ++m) {
    const long centre = half_len + m * ratio.down;
    double acc = 0.0;
    for (long k = centre % ratio.up; k < taps; k += ratio.up) {
      const long j = (centre - k) / ratio.up;
      if (j < 0) break;
      if (j < n_in) acc += h[static_cast<std::size_t>(k)] * x.samples[static_cast<std::size_t>(j)];
    }
    y.samples[static_cast<std::size_t>(m)] = acc;
  }
  return y;
}

Envelope normalize_unit_interval(const SampledSignal& x) {
  x.validate();
  const auto [lo_it, hi_it] = std::minmax_element(x.samples.begin(), x.samples.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  Envelope env{{std::vector<double>(x.size(), 0.0), x.rate}, true, false};
  if (hi == lo) {
    env.degenerate = true;
    return env;
  }
  const double span = hi - lo;
  std::transform(x.samples.begin(), x.samples.end(), env.signal.samples.begin(),
                 [&](double v) { return (v - lo) / span; });
  return env;
}

Envelope preprocess_stimulus(const SampledSignal& audio, const BandSpec& band,
                             double target_rate) {
  audio.validate();
  band.validate_for(audio.rate);
  const SampledSignal envelope = analytic_envelope(audio);
  const SampledSignal filtered = bandpass_zero_phase(envelope, band);
  const SampledSignal downsampled = resample(filtered, target_rate);
  return normalize_unit_interval(downsampled);
}

PreprocessedRecording preprocess_recording(const MultiChannelRecording& rec,
                                           const BandSpec& band, double target_rate) {
  rec.validate();
  band.validate_for(rec.rate);
  PreprocessedRecording out;
  out.recording.rate = target_rate;
  out.recording.channel_labels = rec.channel_labels;
  for (Eigen::Index c = 0; c < rec.channels(); ++c) {
    const SampledSignal filtered = bandpass_zero_phase(rec.channel(c), band);
    const Envelope normalized = normalize_unit_interval(resample(filtered, target_rate));
    if (c == 0) {
      out.recording.data.resize(rec.channels(), static_cast<Eigen::Index>(normalized.size()));
    }
    out.recording.data.row(c) =
        Eigen::Map<const Eigen::RowVectorXd>(normalized.samples().data(),
                                             static_cast<Eigen::Index>(normalized.size()));
    if (normalized.degenerate) out.degenerate_channels.push_back(c);
  }
  return out;
}

}  // namespace aad
