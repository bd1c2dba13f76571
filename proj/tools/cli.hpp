#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hyamabe::cli {

enum ExitCode : int {
    kSuccess = 0,
    kCertificationFailed = 1,
    kUsageError = 2,
    kSolverFailure = 3,
};

/// Runs the command line `args` (without the program name). Normal output
/// goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hyamabe::cli
