#include "support.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <unistd.h>

namespace aad::test {

std::vector<double> gaussian(std::size_t n, Rng& rng, double sd) {
  std::normal_distribution<double> dist(0.0, sd);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

std::vector<double> uniform(std::size_t n, Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

MultiChannelRecording random_recording(Eigen::Index channels, Eigen::Index samples, Rng& rng,
                                       double rate) {
  std::normal_distribution<double> dist(0.0, 1.0);
  MultiChannelRecording rec;
  rec.rate = rate;
  rec.data.resize(channels, samples);
  for (Eigen::Index c = 0; c < channels; ++c) {
    for (Eigen::Index t = 0; t < samples; ++t) rec.data(c, t) = dist(rng);
  }
  return rec;
}

Envelope raw_envelope(std::vector<double> samples, double rate) {
  return Envelope{SampledSignal{std::move(samples), rate}, false, false};
}

SampledSignal sampled(std::vector<double> samples, double rate) {
  return SampledSignal{std::move(samples), rate};
}

std::vector<double> cosine(std::size_t n, double rate, double freq_hz, double amplitude,
                           double phase) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = amplitude * std::cos(2.0 * std::numbers::pi * freq_hz * static_cast<double>(i) / rate + phase);
  }
  return v;
}

TempDir::TempDir(const std::string& tag) {
  static int counter = 0;
  path_ = std::filesystem::temp_directory_path() /
          ("aad_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace aad::test
