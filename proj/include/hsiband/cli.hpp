#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hsiband::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

inline constexpr const char* kVersion = "0.1.0";

// Entry point behind the `hsiband` executable. Subcommands: info, synth,
// select, sweep, classify, fano.
int run(int argc, char** argv);

// Same, with explicit arguments (excluding the program name) and streams.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hsiband::cli
