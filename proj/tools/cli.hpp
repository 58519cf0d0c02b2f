#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace carto::cli {

// Process exit codes.
enum ExitCode : int {
    kSuccess = 0,
    kUsage = 1,
    kSchemaOrIo = 2,
    kDomain = 3,
};

/// Runs one command line (args exclude the program name) and returns the
/// exit code. Nothing is written to a session file unless the command succeeds.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Six significant digits, fixed notation where it stays readable.
std::string format_number(double value);

}  // namespace carto::cli
