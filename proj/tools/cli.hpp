#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace kaon::cli {

/// Runs the lhv command line. `args` excludes the program name. Returns the
/// process exit code; nothing is written outside `out`, `err` and the files
/// named by --out.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kaon::cli
