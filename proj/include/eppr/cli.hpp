#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace eppr::cli {

/// Process exit codes.
enum ExitCode : int {
    ok = 0,
    usage = 2,
    io = 3,
    numerical = 4,
    data = 5,
};

/// Runs the command line `args` (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace eppr::cli
