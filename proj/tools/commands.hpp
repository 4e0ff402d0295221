#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fdbeam::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kFailed = 2,
};

// Runs the command line (args[0] is the program name) and returns the exit code.
// Diagnostics go to `err` as one line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fdbeam::cli
