#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hardy::cli {

/// Runs the command line `args` (program name excluded). Reports go to `out`
/// or to the --out file, diagnostics to `err`. Returns 0 on success or pass,
/// 1 on a failed check, 2 on usage errors, 3 on unmet preconditions.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hardy::cli
