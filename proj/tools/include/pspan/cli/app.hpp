#pragma once

#include <iosfwd>

namespace pspan::cli {

enum ExitCode : int { ok = 0, failure = 1, io_error = 2, validation_error = 3, solver_error = 4 };

/// Entry point of the pspan tool; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pspan::cli
