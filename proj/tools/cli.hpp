#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace aad::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsageError = 1;
inline constexpr int kDataError = 2;

// Runs one `aad` invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Edit distance between two strings, used for "did you mean" hints.
std::size_t levenshtein(const std::string& a, const std::string& b);

}  // namespace aad::cli
