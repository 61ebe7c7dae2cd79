#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fredholm::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kOk = 0,
  kFailed = 1,        // disagreement, undetermined, failing suite, I/O
  kNotFredholm = 2,
  kUsage = 3,         // parse errors, unknown flags, invalid overrides
};

/// Runs the command line `args` (args[0] is the program name). Results go to
/// `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fredholm::cli
