#pragma once

#include "aad/decoding.hpp"
#include "aad/signal.hpp"

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace aad::test {

using Rng = std::mt19937_64;

std::vector<double> gaussian(std::size_t n, Rng& rng, double sd = 1.0);
std::vector<double> uniform(std::size_t n, Rng& rng, double lo = 0.0, double hi = 1.0);

MultiChannelRecording random_recording(Eigen::Index channels, Eigen::Index samples, Rng& rng,
                                       double rate = kWorkingRate);

// Envelope with the given samples, not marked normalized.
Envelope raw_envelope(std::vector<double> samples, double rate = kWorkingRate);

SampledSignal sampled(std::vector<double> samples, double rate);

// x(t) = amplitude · cos(2π f t + phase), t = i / rate.
std::vector<double> cosine(std::size_t n, double rate, double freq_hz, double amplitude = 1.0,
                           double phase = 0.0);

// Fresh empty directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& path);

}  // namespace aad::test
