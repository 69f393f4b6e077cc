#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace resavg {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitNumeric = 2,
  kExitCriteria = 3,
};

/// Command-line entry point: `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace resavg
