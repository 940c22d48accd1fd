#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace photodetach::cli {

// Exit codes.
inline constexpr int exit_success = 0;
inline constexpr int exit_domain_error = 1;
inline constexpr int exit_usage_error = 2;
inline constexpr int exit_validation_failure = 3;

/// Runs the command line `args` (args[0] is the program name) against the given
/// streams and returns the process exit code.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err);

}  // namespace photodetach::cli
