#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cld::cli {

inline constexpr const char* kVersion = "cld 1.0.0";

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,      // I/O and other unexpected failures
    kUsage = 2,        // bad flags or violated preconditions
    kDataError = 3,    // unusable input data
    kDivergence = 4,   // training produced non-finite parameters
};

/// Runs one command line (args[0] is the program name) and returns the
/// exit code. Normal output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cld::cli
