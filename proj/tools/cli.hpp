#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dirichar::cli {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

/// Runs the tool on `args` (program name excluded). Reports and CSV go to
/// `out` unless redirected by --out; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dirichar::cli
