#pragma once

#include <string>
#include <vector>

namespace fujita::cli {

enum ExitCode { kPass = 0, kCheckFailed = 1, kConfigError = 2, kRuntimeError = 3 };

/// Parses the command line and dispatches one of weight-check,
/// kernel-verify, simulate, sweep, fit, picard. Returns the exit code.
int run(const std::vector<std::string>& args);

}  // namespace fujita::cli
