#include <cstdio>
#include <string>
#include <vector>

#include "relcomm/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  const relcomm::CliResult result = relcomm::run_command(args);
  std::fputs(result.out.c_str(), stdout);
  std::fputs(result.err.c_str(), stderr);
  return result.exit_code;
}
