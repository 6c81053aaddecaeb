#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace aad::fft {

// Non-negative-frequency half of the DFT of a real sequence (n/2 + 1 bins).
std::vector<std::complex<double>> forward_real(std::span<const double> x);

// Inverse of forward_real for a length-n sequence, including the 1/n factor.
std::vector<double> inverse_real(std::span<const std::complex<double>> half_spectrum,
                                 std::size_t n);

// Analytic signal x + j·H{x}: negative frequencies zeroed, positive doubled,
// DC and (for even n) Nyquist left unchanged.
std::vector<std::complex<double>> analytic_signal(std::span<const double> x);

}  // namespace aad::fft
