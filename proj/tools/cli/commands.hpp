#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace locfit::cli {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kData = 3,
  kNumeric = 4,
};

/// Entry point of the `locfit` tool; returns the process exit code.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace locfit::cli
