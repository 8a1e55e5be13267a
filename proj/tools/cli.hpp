#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace finjj::cli {

// Exit codes.
inline constexpr int exit_ok = 0;
inline constexpr int exit_bad_parameter = 1;
inline constexpr int exit_not_converged = 2;
inline constexpr int exit_check_failed = 3;

/// Runs one subcommand. `args` excludes the program name. Tables go to the
/// --output file when given, otherwise to `out`; the one-line summary goes
/// to `out` in the first case and to `err` in the second.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace finjj::cli
