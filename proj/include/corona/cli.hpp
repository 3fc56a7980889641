#pragma once

#include <iosfwd>

namespace corona {

// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,     // validate found a failing property
  kExitConfigError = 2,     // bad flags or config contents
  kExitInfeasible = 3,      // no feasible layout, p_i > 1, or too few nodes
  kExitNonConvergence = 4,
  kExitIoError = 5,
  kExitBadPlanFile = 6,     // plan parse error or schema mismatch
};

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace corona
