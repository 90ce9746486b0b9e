#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fracvar::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNumerical = 1;  // non-convergence, blow-up, failed --check
inline constexpr int kExitUsage = 2;      // bad arguments, unreadable or invalid problem file

/// Runs one subcommand. `args` excludes the program name. Artifacts go to
/// the -o path or to `out`; diagnostics go to `err` as one JSON object per
/// line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fracvar::cli
