#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace konp::cli {

enum ExitCode : int { ok = 0, validation_failure = 2, io_failure = 3, internal_failure = 4 };

/// Runs the konp command line with the given arguments (argv[0] excluded).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace konp::cli
