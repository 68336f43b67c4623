#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sacl {

/// Entry point of the `sacl` tool. `args` excludes the program name.
/// Returns the process exit code; errors are reported as one JSON object on `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sacl
