#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bnnmi::cli {

// Process exit codes.
enum ExitCode : int {
  kSuccess = 0,
  kVerificationFailed = 1,
  kInputError = 2,
  kDomainError = 3,
  kDegenerate = 4,
};

// Runs one command line. `args[0]` is the program name. Normal output goes to
// `out`, diagnostics to `err`; the return value is the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bnnmi::cli
