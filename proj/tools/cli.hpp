#ifndef SPAI_TOOLS_CLI_HPP
#define SPAI_TOOLS_CLI_HPP

#include <iosfwd>

namespace spai::cli {

/// Exit codes of the spai command.
enum Exit : int {
	ok = 0,
	failure = 1,
	breakdown = 2,
	stagnated = 3,
};

/// Runs the command line; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv);

} // namespace spai::cli

#endif
