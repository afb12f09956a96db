#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace waveguide {

/// Exit codes of the command-line front end.
enum ExitCode : int { kOk = 0, kCheckFailed = 1, kConfigError = 2, kNumericError = 3 };

/// args excludes the program name. Reports go to files under the output directory;
/// a short summary goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace waveguide
