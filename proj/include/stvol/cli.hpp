#pragma once

#include <iosfwd>

namespace stvol::cli {

/// Runs the command line. Exit codes: 0 success, 2 usage, parse or domain
/// error, 3 numerical failure, 1 anything unexpected.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace stvol::cli
