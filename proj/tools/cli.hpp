#pragma once

#include <iosfwd>

namespace rlg {

/// Exit codes of `rlg solve`; other subcommands use 0 for success, 1 for a
/// failed check and kExitUsage / kExitError otherwise.
inline constexpr int kExitCopWins = 0;
inline constexpr int kExitRobberWins = 1;
inline constexpr int kExitUnknown = 2;
inline constexpr int kExitUsage = 3;
inline constexpr int kExitError = 4;

/// The whole `rlg` command line, writing to the given streams.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rlg
