#pragma once

#include <iosfwd>

namespace brpv::cli {

enum ExitCode : int {
  kOk = 0,
  kVerdictFailed = 1,
  kUsage = 2,
  kNumerical = 3,
};

/// Parses argv, dispatches one subcommand and returns its exit code. Data go
/// to `out` (or the --out file); diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace brpv::cli
