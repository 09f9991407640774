#pragma once

#include <string>
#include <vector>

namespace relcomm {

/// Outcome of one CLI invocation: captured streams plus the process exit
/// code (0 success, 1 configuration error, 2 non-convergence, 3 verification
/// failure).
struct CliResult {
  int exit_code = 0;
  std::string out;
  std::string err;
};

/// In-process entry point for the command-line tool; the installed binary is
/// a thin wrapper around this. args excludes the program name.
CliResult run_command(const std::vector<std::string>& args);

}  // namespace relcomm
