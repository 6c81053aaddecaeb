#include "aad/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace aad::fft {
namespace {

// FFTW's planner is not re-entrant; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};
template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <typename T>
FftwBuffer<T> allocate(std::size_t count) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * std::max<std::size_t>(count, 1)));
  if (p == nullptr) throw std::bad_alloc();
  return FftwBuffer<T>(p);
}

class Plan {
 public:
  explicit Plan(fftw_plan plan) : plan_(plan) {
    if (plan_ == nullptr) throw std::runtime_error("fftw: plan creation failed");
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_;
};

}  // namespace

std::vector<std::complex<double>> forward_real(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  auto in = allocate<double>(n);
  auto out = allocate<fftw_complex>(n / 2 + 1);
  std::unique_ptr<Plan> plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = std::make_unique<Plan>(
        fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE));
  }
  std::copy(x.begin(), x.end(), in.get());
  plan->execute();

  std::vector<std::complex<double>> spectrum(n / 2 + 1);
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    spectrum[k] = {out[k][0], out[k][1]};
  }
  return spectrum;
}

std::vector<double> inverse_real(std::span<const std::complex<double>> half_spectrum,
                                 std::size_t n) {
  if (n == 0) return {};
  if (half_spectrum.size() != n / 2 + 1) {
    throw std::invalid_argument("inverse_real: spectrum must hold n/2 + 1 bins");
  }
  auto in = allocate<fftw_complex>(n / 2 + 1);
  auto out = allocate<double>(n);
  std::unique_ptr<Plan> plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = std::make_unique<Plan>(
        fftw_plan_dft_c2r_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE));
  }
  for (std::size_t k = 0; k < half_spectrum.size(); ++k) {
    in[k][0] = half_spectrum[k].real();
    in[k][1] = half_spectrum[k].imag();
  }
  plan->execute();

  std::vector<double> y(n);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = out[i] * scale;
  return y;
}

std::vector<std::complex<double>> analytic_signal(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  const auto half = forward_real(x);

  auto in = allocate<fftw_complex>(n);
  auto out = allocate<fftw_complex>(n);
  std::unique_ptr<Plan> plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = std::make_unique<Plan>(fftw_plan_dft_1d(static_cast<int>(n), in.get(), out.get(),
                                                   FFTW_BACKWARD, FFTW_ESTIMATE));
  }

  // Bins 1..ceil(n/2)-1 are strictly positive frequencies.
  const std::size_t positive_end = (n + 1) / 2;
  for (std::size_t k = 0; k < n; ++k) {
    in[k][0] = 0.0;
    in[k][1] = 0.0;
  }
  in[0][0] = half[0].real();
  in[0][1] = half[0].imag();
  for (std::size_t k = 1; k < positive_end; ++k) {
    in[k][0] = 2.0 * half[k].real();
    in[k][1] = 2.0 * half[k].imag();
  }
  if (n % 2 == 0) {
    in[n / 2][0] = half[n / 2].real();
    in[n / 2][1] = half[n / 2].imag();
  }
  plan->execute();

  std::vector<std::complex<double>> z(n);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = {out[i][0] * scale, out[i][1] * scale};
  return z;
}

}  // namespace aad::fft
