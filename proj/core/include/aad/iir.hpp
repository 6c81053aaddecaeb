#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace aad::iir {

// Second-order section, a0 normalized to 1:
//   H(z) = (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2)
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
};

using SosCascade = std::vector<Biquad>;

// Digital Butterworth sections by bilinear transform with pre-warping.
// order must be even and >= 2; one section per conjugate pole pair.
SosCascade butterworth_lowpass(int order, double cutoff_hz, double rate);
SosCascade butterworth_highpass(int order, double cutoff_hz, double rate);

// High-pass at low_hz cascaded with low-pass at high_hz, each of the given
// order (order/2 sections per edge).
SosCascade butterworth_bandpass(int order, double low_hz, double high_hz, double rate);

// |H(e^{j 2 pi f / rate})| of the cascade.
double magnitude_response(std::span<const Biquad> sos, double freq_hz, double rate);

// Causal pass through the cascade (transposed direct form II). When
// steady_state_start is set, every section starts in the steady state it
// would reach for a constant input equal to x[0].
std::vector<double> filter(std::span<const double> x, std::span<const Biquad> sos,
                           bool steady_state_start);

// Forward-backward filtering with mirror padding of padlen samples on each
// side (x[pad], ..., x[1] before; clamped to x.size() - 1). Mirroring keeps
// the local mean continuous across the edge, so a signal riding on a large
// offset does not kick the high-pass edge into a long transient. Zero net
// phase; squared magnitude.
std::vector<double> filtfilt(std::span<const double> x, std::span<const Biquad> sos,
                             std::size_t padlen);

}  // namespace aad::iir
