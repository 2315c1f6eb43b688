#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace lprotector::cli {

/// Exit codes: 0 success, 2 input or configuration error, 3 provider or
/// transport error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitProvider = 3;

/// Runs the command line `args` (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lprotector::cli
