#pragma once

#include <iosfwd>

namespace compskip {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Entry point of the `compskip` tool. Subcommands: train, export, eval-sim,
/// eval-analogy, eval-phrase, neighbors, inspect-manifest.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace compskip
