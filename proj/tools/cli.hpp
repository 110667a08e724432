#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace geoprec::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kInputError = 2,
  kNumericalFailure = 3,
};

/// Runs one command line. `args` excludes the program name.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace geoprec::cli
