#pragma once

#include "aad/signal.hpp"

#include <filesystem>
#include <iosfwd>

namespace aad::io {

// CSV layout:
//   # rate=<Hz>
//   <label>,<label>,...      (only when the recording carries labels)
//   <v>,<v>,...              (one row per sample, one column per channel)
// Values use the shortest round-trip decimal form, so write → read is exact.
void write_csv(std::ostream& out, const MultiChannelRecording& rec);
MultiChannelRecording read_csv(std::istream& in);

// Binary layout, all little-endian:
//   8-byte magic "AADSIG\0\1", u64 channels, u64 samples, f64 rate,
//   then channels × samples f64 values, channel-major.
inline constexpr char kBinaryMagic[8] = {'A', 'A', 'D', 'S', 'I', 'G', '\0', '\1'};
void write_binary(std::ostream& out, const MultiChannelRecording& rec);
MultiChannelRecording read_binary(std::istream& in);

// Dispatch on extension: ".csv" is text, anything else binary.
void write_recording(const std::filesystem::path& path, const MultiChannelRecording& rec);
MultiChannelRecording read_recording(const std::filesystem::path& path);

// Single-channel views used for envelopes and audio.
MultiChannelRecording as_recording(const SampledSignal& signal);
SampledSignal as_signal(const MultiChannelRecording& rec);

void write_signal(const std::filesystem::path& path, const SampledSignal& signal);
SampledSignal read_signal(const std::filesystem::path& path);

// Reads a stored envelope; the normalized/degenerate flags are inferred
// from the samples.
Envelope read_envelope(const std::filesystem::path& path);

}  // namespace aad::io
