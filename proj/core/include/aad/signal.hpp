#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace aad {

// Channels × time, each channel contiguous.
using ChannelMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Working rate of the decoder, and the default preprocessing band.
inline constexpr double kWorkingRate = 128.0;
inline constexpr double kDefaultBandLowHz = 0.3;
inline constexpr double kDefaultBandHighHz = 30.0;

struct SampledSignal {
  std::vector<double> samples;
  double rate = 0.0;  // Hz

  std::size_t size() const noexcept { return samples.size(); }

  // Throws InvalidInput unless rate > 0, length >= 1 and all samples finite.
  void validate() const;
  bool operator==(const SampledSignal&) const = default;
};

struct MultiChannelRecording {
  ChannelMatrix data;  // channels × samples
  double rate = 0.0;   // Hz
  std::vector<std::string> channel_labels;  // empty or one per channel

  Eigen::Index channels() const noexcept { return data.rows(); }
  Eigen::Index samples() const noexcept { return data.cols(); }

  SampledSignal channel(Eigen::Index c) const;
  void validate() const;
  bool operator==(const MultiChannelRecording& other) const;
};

// A stimulus envelope. When normalized, samples lie in [0, 1] with max 1,
// unless the source was constant, in which case it is all zero and
// `degenerate` is set.
struct Envelope {
  SampledSignal signal;
  bool normalized = false;
  bool degenerate = false;

  std::size_t size() const noexcept { return signal.size(); }
  double rate() const noexcept { return signal.rate; }
  const std::vector<double>& samples() const noexcept { return signal.samples; }
  bool operator==(const Envelope&) const = default;
};

struct BandSpec {
  double low_hz = kDefaultBandLowHz;
  double high_hz = kDefaultBandHighHz;

  // Throws InvalidBand unless 0 < low < high < rate/2.
  void validate_for(double rate) const;
};

// Order of each band edge of the recursive band-pass (applied twice).
inline constexpr int kBandpassOrder = 4;

// |analytic signal| via the frequency-domain construction.
SampledSignal analytic_envelope(const SampledSignal& x);

// Zero-phase band-pass: Butterworth high-pass/low-pass cascade run forward
// then backward over a mirror-padded extension of the input.
SampledSignal bandpass_zero_phase(const SampledSignal& x, const BandSpec& band);

// Reflection length used by bandpass_zero_phase for a band at a given rate.
std::size_t bandpass_padding(const BandSpec& band, double rate);

// Integer up/down factors for target/source, reduced by their gcd.
struct ResampleRatio {
  long up = 1;
  long down = 1;
};
ResampleRatio resample_ratio(double source_rate, double target_rate);

// Rational polyphase resampling with a Kaiser-windowed sinc anti-alias
// filter at min(rates)/2. Output length is ceil(n·up/down). Equal rates
// return the input unchanged.
SampledSignal resample(const SampledSignal& x, double target_rate);

// (x − min)/(max − min); a constant input maps to all zeros with the
// degenerate flag set.
Envelope normalize_unit_interval(const SampledSignal& x);

// analytic_envelope → bandpass_zero_phase(0.3–30 Hz) → resample(128 Hz) →
// normalize_unit_interval.
Envelope preprocess_stimulus(const SampledSignal& audio, const BandSpec& band = {},
                             double target_rate = kWorkingRate);

struct PreprocessedRecording {
  MultiChannelRecording recording;
  std::vector<Eigen::Index> degenerate_channels;
};

// Per channel: bandpass_zero_phase → resample → min-max normalization.
PreprocessedRecording preprocess_recording(const MultiChannelRecording& rec,
                                           const BandSpec& band = {},
                                           double target_rate = kWorkingRate);

}  // namespace aad
