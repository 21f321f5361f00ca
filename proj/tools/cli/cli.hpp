#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qhmm::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kSuccess = 0,        // success, valid model, consistent verdict
  kDomainFailure = 1,  // invalid model, refuted or withheld verdict, failed verification
  kUsageError = 2,     // bad flags, unreadable or malformed input
};

/// Runs the command line `args` (without the program name). Normal output
/// goes to `out` (or to --output), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qhmm::cli
