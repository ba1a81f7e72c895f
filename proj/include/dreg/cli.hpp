#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dreg::cli {

/// Exit codes of the `daniel` tool.
enum ExitCode : int {
    kOk = 0,
    kFailure = 1,      // I/O, parse or usage error
    kNoConsensus = 2,  // the solver found no supported model
};

/// Runs the tool with `args` (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dreg::cli
