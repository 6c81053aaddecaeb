#pragma once

#include "aad/serialize.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace aad {

inline constexpr int kConfigVersion = 1;
inline constexpr std::string_view kToolVersion = "1.0.0";

// Checks "version" is present and equal to kConfigVersion and that every
// other key is in `allowed`. Throws ConfigError otherwise.
void validate_run_config(const Json& config, const std::vector<std::string>& allowed);

Json load_run_config(const std::filesystem::path& path,
                     const std::vector<std::string>& allowed);

// 64-bit FNV-1a, as 16 lowercase hex digits.
std::string fnv1a64_hex(std::string_view bytes);
std::string file_hash(const std::filesystem::path& path);

// Library versions linked into this build.
Json build_versions();

using FileHashes = std::map<std::string, std::string>;  // file name -> hash

// Reproducibility record written next to every CLI output: the effective
// configuration, its hash, the seed, and hashes of the files read and
// produced (keyed by file name, never by path). Contains nothing time- or
// host-dependent.
Json make_manifest(std::string_view subcommand, const Json& effective_config,
                   std::optional<std::uint64_t> seed, const FileHashes& inputs,
                   const FileHashes& outputs);

}  // namespace aad
