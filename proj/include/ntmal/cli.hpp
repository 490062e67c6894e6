#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ntmal::cli {

/// Runs the command line `args` (args[0] is the program name). Returns the
/// process exit code: 0 on success, 1 on a runtime failure, other nonzero
/// codes for usage errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ntmal::cli
