#pragma once

#include <iosfwd>

namespace crsmdp::cli {

/// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitInfeasible = 2;

/// Entry point of the `crsmdp` tool: solve, eval, check, counterexample, selftest.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace crsmdp::cli
