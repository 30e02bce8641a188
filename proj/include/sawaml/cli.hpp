#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sawaml {

/// Command-line entry point. `args` excludes the program name. Returns 0 on
/// success; diagnostics go to `err`.
int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sawaml
