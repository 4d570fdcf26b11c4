#pragma once

namespace mrprio::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 2,
  kApplicabilityError = 3,
  kInvariantError = 4,
};

/// Entry point of the `mrprio` command line tool.
int run(int argc, const char* const* argv);

}  // namespace mrprio::cli
