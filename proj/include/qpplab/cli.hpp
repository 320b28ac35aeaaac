#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace qpplab::cli {

inline constexpr const char* kVersion = "1.0.0";

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kParse = 2;
inline constexpr int kAlignment = 3;
inline constexpr int kMerge = 4;

/// Runs one subcommand. `args` excludes the program name. Primary output
/// goes to `out` unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qpplab::cli
