#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace costas::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kMismatch = 3,
  kDiverged = 4,
};

/// Runs one invocation. args excludes the program name. Data goes to out,
/// logs and diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace costas::cli
