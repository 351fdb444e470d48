#pragma once

// emgctl front end. run_cli() is the whole program minus process setup, so
// tests can drive it in-process.

#include <iosfwd>
#include <string>
#include <vector>

namespace emg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitLatency = 4;

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace emg::cli
