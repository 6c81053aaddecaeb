#include "aad/iir.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace aad::iir {
namespace {

void check_design(int order, double cutoff_hz, double rate) {
  if (order < 2 || order % 2 != 0) {
    throw std::invalid_argument("butterworth: order must be even and >= 2");
  }
  if (!(rate > 0.0) || !(cutoff_hz > 0.0) || !(cutoff_hz < rate / 2.0)) {
    throw std::invalid_argument("butterworth: cutoff must lie in (0, rate/2)");
  }
}

// Analog denominator s^2 + damping*wc*s + wc^2 for each pole pair of an
// order-n Butterworth prototype.
std::vector<double> pole_pair_damping(int order) {
  std::vector<double> damping;
  for (int k = 0; k < order / 2; ++k) {
    const double theta = std::numbers::pi * (2.0 * k + 1.0) / (2.0 * order);
    damping.push_back(2.0 * std::sin(theta));
  }
  return damping;
}

SosCascade design(int order, double cutoff_hz, double rate, bool highpass) {
  check_design(order, cutoff_hz, rate);
  const double k = 2.0 * rate;
  const double wc = k * std::tan(std::numbers::pi * cutoff_hz / rate);
  SosCascade sos;
  for (const double damping : pole_pair_damping(order)) {
    const double c1 = damping * wc;
    const double c0 = wc * wc;
    const double d0 = k * k + c1 * k + c0;
    Biquad s;
    s.a1 = (2.0 * c0 - 2.0 * k * k) / d0;
    s.a2 = (k * k - c1 * k + c0) / d0;
    if (highpass) {
      const double g = k * k / d0;
      s.b0 = g;
      s.b1 = -2.0 * g;
      s.b2 = g;
    } else {
      const double g = c0 / d0;
      s.b0 = g;
      s.b1 = 2.0 * g;
      s.b2 = g;
    }
    sos.push_back(s);
  }
  return sos;
}

}  // namespace

SosCascade butterworth_lowpass(int order, double cutoff_hz, double rate) {
  return design(order, cutoff_hz, rate, false);
}

SosCascade butterworth_highpass(int order, double cutoff_hz, double rate) {
  return design(order, cutoff_hz, rate, true);
}

SosCascade butterworth_bandpass(int order, double low_hz, double high_hz, double rate) {
  if (!(low_hz < high_hz)) {
    throw std::invalid_argument("butterworth_bandpass: requires low_hz < high_hz");
  }
  SosCascade sos = butterworth_highpass(order, low_hz, rate);
  const SosCascade lp = butterworth_lowpass(order, high_hz, rate);
  sos.insert(sos.end(), lp.begin(), lp.end());
  return sos;
}

double magnitude_response(std::span<const Biquad> sos, double freq_hz, double rate) {
  const std::complex<double> z1 =
      std::polar(1.0, -2.0 * std::numbers::pi * freq_hz / rate);
  const std::complex<double> z2 = z1 * z1;
  std::complex<double> h = 1.0;
  for (const Biquad& s : sos) {
    h *= (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2);
  }
  return std::abs(h);
}

std::vector<double> filter(std::span<const double> x, std::span<const Biquad> sos,
                           bool steady_state_start) {
  std::vector<double> y(x.begin(), x.end());
  if (y.empty()) return y;
  for (const Biquad& s : sos) {
    double z1 = 0.0;
    double z2 = 0.0;
    if (steady_state_start) {
      // Constant input u gives constant output H(1)·u; solve the state update
      // at that fixed point.
      const double u = y.front();
      const double gain = (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
      const double v = gain * u;
      z2 = s.b2 * u - s.a2 * v;
      z1 = s.b1 * u - s.a1 * v + z2;
    }
    for (double& sample : y) {
      const double in = sample;
      const double out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      sample = out;
    }
  }
  return y;
}

std::vector<double> filtfilt(std::span<const double> x, std::span<const Biquad> sos,
                             std::size_t padlen) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  const std::size_t pad = std::min(padlen, n - 1);

  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i) ext.push_back(x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= pad; ++i) ext.push_back(x[n - 1 - i]);

  std::vector<double> y = filter(ext, sos, true);
  std::reverse(y.begin(), y.end());
  y = filter(y, sos, true);
  std::reverse(y.begin(), y.end());

  return {y.begin() + static_cast<std::ptrdiff_t>(pad),
          y.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

}  // namespace aad::iir
