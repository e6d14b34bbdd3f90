#pragma once

#include <string>
#include <vector>

namespace ineq {

/// Runs one CLI invocation (argv without the program name).
/// Exit codes: 0 pass, 1 inequality violation recorded, 2 usage/parse error,
/// 3 numerical non-convergence.
int dispatch(const std::vector<std::string>& args);

}  // namespace ineq
