#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace primerace::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kIo = 3,
  kPrecision = 4,
};

/// Runs the tool on `args` (without the program name).  Reports go to `out`
/// unless --output names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace primerace::cli
