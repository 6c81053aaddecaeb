#include "aad/config.hpp"

#include "aad/error.hpp"

#include <Eigen/Core>
#include <fftw3.h>

#include <cstdio>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

namespace aad {

void validate_run_config(const Json& config, const std::vector<std::string>& allowed) {
  if (!config.is_object()) throw ConfigError("config must be a JSON object");
  if (!config.contains("version")) throw ConfigError("config is missing \"version\"");
  if (!config.at("version").is_number_integer() || config.at("version") != kConfigVersion) {
    throw ConfigError("unsupported config version " + config.at("version").dump() + " (expected " +
                      std::to_string(kConfigVersion) + ")");
  }
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, value] : config.items()) {
    if (key != "version" && !keys.count(key)) throw ConfigError("unknown config key '" + key + "'");
  }
}

Json load_run_config(const std::filesystem::path& path,
                     const std::vector<std::string>& allowed) {
  Json config = read_json(path);
  validate_run_config(config, allowed);
  return config;
}

std::string fnv1a64_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string file_hash(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return fnv1a64_hex(bytes);
}

Json build_versions() {
  return Json{{"aad", std::string(kToolVersion)},
              {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                            "." + std::to_string(EIGEN_MINOR_VERSION)},
              {"fftw", std::string(fftw_version)},
              {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                    std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                    std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
              {"compiler", std::string(__VERSION__)}};
}

Json make_manifest(std::string_view subcommand, const Json& effective_config,
                   std::optional<std::uint64_t> seed, const FileHashes& inputs,
                   const FileHashes& outputs) {
  const auto as_json = [](const FileHashes& files) {
    Json j = Json::object();
    for (const auto& [name, hash] : files) j[name] = hash;
    return j;
  };
  return Json{{"tool", "aad"},
              {"subcommand", std::string(subcommand)},
              {"config", effective_config},
              {"config_hash", fnv1a64_hex(effective_config.dump())},
              {"seed", seed ? Json(*seed) : Json(nullptr)},
              {"versions", build_versions()},
              {"inputs", as_json(inputs)},
              {"outputs", as_json(outputs)}};
}

}  // namespace aad
