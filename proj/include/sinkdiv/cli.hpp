#pragma once

#include <iosfwd>

namespace sinkdiv {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitSolver = 2;

// Entry point of the `sinkdiv` tool: subcommands compute, sweep, dither and
// potentials. Result JSON goes to `out`, messages to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv);

}  // namespace sinkdiv
