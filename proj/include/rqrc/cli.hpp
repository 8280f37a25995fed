#pragma once

// Batch experiment runner behind the `rqrc` executable.

#include <iosfwd>
#include <string>
#include <vector>

namespace rqrc::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kConfigError = 2,
    kNumericalError = 3,
};

/// Parses `args` (without the program name), runs the subcommand and returns
/// the process exit code. Errors are reported on `err` as one line:
///   error=<code> exit=<n> message="<text>"
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rqrc::cli
