#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace scriptwp {

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitInputError = 2, kExitUnsupported = 3 };

/// Runs the command line `args` (args[0] is the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace scriptwp
