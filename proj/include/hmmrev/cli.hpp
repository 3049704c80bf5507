#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hmmrev::cli {

enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kFileError = 2,
  kInvalidModel = 3,
  kSymbolOutOfRange = 4,
  kScanTooLarge = 5,
  kUsage = 64,
};

/// Runs one command (`args` excludes the program name). Reports go to `out`,
/// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// 17 significant digits with a '.' separator, independent of the C locale.
std::string format_double(double x);

}  // namespace hmmrev::cli
