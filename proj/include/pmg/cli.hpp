#pragma once
#include <string>
#include <vector>

namespace pmg {

// In-process entry point used by the binary and the tests. `args` excludes
// the program name. CSV payload lands in `out` unless --output redirects
// it to a file; warnings and diagnostics land in `err`.
struct CliResult {
  int exit_code = 0;
  std::string out;
  std::string err;
};

CliResult cli_run(const std::vector<std::string>& args);

int cli_main(int argc, const char* const* argv);

}  // namespace pmg
