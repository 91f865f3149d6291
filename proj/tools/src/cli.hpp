#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace smoothqr::cli {

/// Parses the command line and runs one subcommand (fit, cv, flam, simulate,
/// bench). Results go to --output when given, otherwise to `out`; messages go
/// to `err`. Returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Convenience overload for tests: `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace smoothqr::cli
