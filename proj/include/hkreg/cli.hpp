#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hkreg::cli {

enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kConfigError = 2,
  kRuntimeError = 3,
};

/// Entry point of the `hkreg` tool. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hkreg::cli
