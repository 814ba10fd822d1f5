#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace seedpower::cli {

/// Process exit codes.
enum class ExitCode : int {
    success = 0,
    usage = 2,
    data = 3,         ///< schema or insufficient data
    numerical = 4,    ///< degenerate sample or non-convergence
    unattainable = 5, ///< plan target not reachable within --n-max
    io = 6,           ///< file could not be opened, read or written
};

/// Runs one command. `args` excludes the program name. Machine-readable
/// output goes to `out` (unless --out is given), diagnostics and the
/// human-readable summary to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace seedpower::cli
