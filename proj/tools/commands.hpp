#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace monoquad::cli {

enum ExitCode : int {
    kSuccess = 0,
    kFailure = 1,
    kParseError = 2,
    kInvariantViolation = 3,
    kResourceCap = 4,
};

inline constexpr const char* kToolName = "monoquad";
inline constexpr const char* kToolVersion = "0.1.0";

/// Runs one command line (without the program name). Results go to `out`
/// unless --out is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace monoquad::cli
