#include "aad/signal_io.hpp"

#include "aad/error.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace aad::io {
namespace {

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw FormatError("cannot format value");
  return {buf.data(), end};
}

double parse_double(std::string_view text, std::size_t line) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw FormatError("line " + std::to_string(line) + ": '" + std::string(text) +
                      "' is not a number");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

bool looks_numeric(std::string_view field) {
  double v = 0.0;
  while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  return ec == std::errc{} && ptr != field.data();
}

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> bytes{};
  for (int i = 0; i < 8; ++i) bytes[static_cast<std::size_t>(i)] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(bytes.data(), 8);
}

std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), 8)) {
    throw FormatError("binary signal: truncated");
  }
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[static_cast<std::size_t>(i)];
  return v;
}

bool has_extension(const std::filesystem::path& path, std::string_view ext) {
  std::string e = path.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
  return e == ext;
}

}  // namespace

void write_csv(std::ostream& out, const MultiChannelRecording& rec) {
  out << "# rate=" << format_double(rec.rate) << '\n';
  if (!rec.channel_labels.empty()) {
    for (std::size_t c = 0; c < rec.channel_labels.size(); ++c) {
      if (rec.channel_labels[c].find_first_of(",\n") != std::string::npos) {
        throw FormatError("channel label '" + rec.channel_labels[c] + "' contains a separator");
      }
      out << (c ? "," : "") << rec.channel_labels[c];
    }
    out << '\n';
  }
  std::string row;
  for (Eigen::Index t = 0; t < rec.samples(); ++t) {
    row.clear();
    for (Eigen::Index c = 0; c < rec.channels(); ++c) {
      if (c) row += ',';
      row += format_double(rec.data(c, t));
    }
    out << row << '\n';
  }
  if (!out) throw FormatError("csv: write failed");
}

MultiChannelRecording read_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw FormatError("csv: empty input");
  constexpr std::string_view kPrefix = "# rate=";
  if (line.rfind(kPrefix, 0) != 0) {
    throw FormatError("csv: first line must be '# rate=<Hz>'");
  }
  MultiChannelRecording rec;
  rec.rate = parse_double(std::string_view(line).substr(kPrefix.size()), line_no);

  std::vector<std::vector<double>> columns;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line);
    if (columns.empty() && rec.channel_labels.empty() && !looks_numeric(fields.front())) {
      rec.channel_labels.assign(fields.begin(), fields.end());
      continue;
    }
    if (columns.empty()) columns.resize(fields.size());
    if (fields.size() != columns.size()) {
      throw FormatError("csv line " + std::to_string(line_no) + ": expected " +
                        std::to_string(columns.size()) + " columns, got " +
                        std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      columns[c].push_back(parse_double(fields[c], line_no));
    }
  }
  if (columns.empty()) throw FormatError("csv: no samples");
  if (!rec.channel_labels.empty() && rec.channel_labels.size() != columns.size()) {
    throw FormatError("csv: header names " + std::to_string(rec.channel_labels.size()) +
                      " channels but rows hold " + std::to_string(columns.size()));
  }
  rec.data.resize(static_cast<Eigen::Index>(columns.size()),
                  static_cast<Eigen::Index>(columns.front().size()));
  for (std::size_t c = 0; c < columns.size(); ++c) {
    std::copy(columns[c].begin(), columns[c].end(), rec.data.row(static_cast<Eigen::Index>(c)).begin());
  }
  return rec;
}

void write_binary(std::ostream& out, const MultiChannelRecording& rec) {
  out.write(kBinaryMagic, sizeof(kBinaryMagic));
  put_u64(out, static_cast<std::uint64_t>(rec.channels()));
  put_u64(out, static_cast<std::uint64_t>(rec.samples()));
  put_u64(out, std::bit_cast<std::uint64_t>(rec.rate));
  for (Eigen::Index c = 0; c < rec.channels(); ++c) {
    for (Eigen::Index t = 0; t < rec.samples(); ++t) {
      put_u64(out, std::bit_cast<std::uint64_t>(rec.data(c, t)));
    }
  }
  if (!out) throw FormatError("binary signal: write failed");
}

MultiChannelRecording read_binary(std::istream& in) {
  char magic[sizeof(kBinaryMagic)] = {};
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kBinaryMagic, sizeof(magic)) != 0) {
    throw FormatError("binary signal: bad magic");
  }
  const std::uint64_t channels = get_u64(in);
  const std::uint64_t samples = get_u64(in);
  MultiChannelRecording rec;
  rec.rate = std::bit_cast<double>(get_u64(in));
  constexpr std::uint64_t kLimit = std::uint64_t{1} << 34;
  if (channels == 0 || samples == 0 || channels > kLimit / samples) {
    throw FormatError("binary signal: implausible shape " + std::to_string(channels) + "x" +
                      std::to_string(samples));
  }
  rec.data.resize(static_cast<Eigen::Index>(channels), static_cast<Eigen::Index>(samples));
  for (Eigen::Index c = 0; c < rec.channels(); ++c) {
    for (Eigen::Index t = 0; t < rec.samples(); ++t) {
      rec.data(c, t) = std::bit_cast<double>(get_u64(in));
    }
  }
  return rec;
}

void write_recording(const std::filesystem::path& path, const MultiChannelRecording& rec) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
  if (has_extension(path, ".csv")) {
    write_csv(out, rec);
  } else {
    write_binary(out, rec);
  }
}

MultiChannelRecording read_recording(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  MultiChannelRecording rec = has_extension(path, ".csv") ? read_csv(in) : read_binary(in);
  rec.validate();
  return rec;
}

MultiChannelRecording as_recording(const SampledSignal& signal) {
  MultiChannelRecording rec;
  rec.rate = signal.rate;
  rec.data = Eigen::Map<const Eigen::RowVectorXd>(signal.samples.data(),
                                                  static_cast<Eigen::Index>(signal.size()));
  return rec;
}

SampledSignal as_signal(const MultiChannelRecording& rec) {
  if (rec.channels() != 1) {
    throw DimensionMismatch("expected a single-channel signal, got " +
                            std::to_string(rec.channels()) + " channels");
  }
  return rec.channel(0);
}

void write_signal(const std::filesystem::path& path, const SampledSignal& signal) {
  write_recording(path, as_recording(signal));
}

SampledSignal read_signal(const std::filesystem::path& path) {
  return as_signal(read_recording(path));
}

Envelope read_envelope(const std::filesystem::path& path) {
  Envelope env;
  env.signal = read_signal(path);
  const auto [lo, hi] = std::minmax_element(env.signal.samples.begin(), env.signal.samples.end());
  env.degenerate = *lo == 0.0 && *hi == 0.0;
  env.normalized = *lo >= 0.0 && (*hi == 1.0 || env.degenerate);
  return env;
}

}  // namespace aad::io
