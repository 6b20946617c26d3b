#pragma once

#include <iosfwd>

namespace tin {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitNumeric = 3 };

/// Runs one `tin` subcommand (train, infer, eval, summary, make-synthetic).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tin
