#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mlcw::cli {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitRuntime = 1,  // I/O and other runtime failures
  kExitUsage = 2,
  kExitParse = 3,
  kExitDomain = 4,
  kExitVerifyFailed = 5,
};

/// Runs the command line `args` (args[0] is the program name). Reports go to
/// `out` unless redirected with -o; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mlcw::cli
