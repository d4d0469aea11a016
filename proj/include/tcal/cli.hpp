#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace tcal::cli {

/// Stable exit codes for scripting.
enum ExitCode : int {
  kOk = 0,
  kUsageError = 2,
  kDataError = 3,
  kIoError = 4,
};

/// Seed used when --seed is not given. --seed 0 draws one from the OS.
inline constexpr std::uint64_t kDefaultSeed = 1234;

/// Runs one subcommand. `args` excludes the program name.
int run(const std::vector<std::string> &args, std::ostream &out,
        std::ostream &err);

} // namespace tcal::cli
