#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cochainflow {

/// Exit codes of the command line tool.
enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitNumerical = 2 };

/// Runs `cochain-flow` with argv-style arguments (args[0] is the program
/// name). Output that would go to stdout/stderr is written to `out`/`err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int cli_main(int argc, char** argv);

}  // namespace cochainflow
