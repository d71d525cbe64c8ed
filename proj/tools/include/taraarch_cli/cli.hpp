#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace taraarch::cli {

enum ExitCode : int {
    kOk = 0,
    kDataError = 1,
    kUsageError = 2,
    kNoConvergence = 3,
    kFailedExperiment = 4,
};

/// Runs one command line (without the program name). Primary output goes to `out`
/// unless --output names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace taraarch::cli
