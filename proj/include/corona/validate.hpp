#pragma once

// Self-checks run by `corona validate`: closed-form identities, the gradient
// against finite differences, and a brute-force spot check of the solver.

#include <string>
#include <vector>

#include "corona/config.hpp"

namespace corona {

enum class CheckStatus { Pass, Fail, Skip };

struct PropertyResult {
  std::string name;
  CheckStatus status = CheckStatus::Pass;
  std::string detail;
};

std::vector<PropertyResult> run_property_suites(const RunConfig& config);

}  // namespace corona
