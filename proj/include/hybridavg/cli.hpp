#ifndef HYBRIDAVG_CLI_HPP
#define HYBRIDAVG_CLI_HPP

#include <iosfwd>

namespace hybridavg {

/// Exit codes of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,   ///< bad arguments, config file or validation failure
  kExitRuntime = 2,  ///< simulation or analysis failure
};

/// Entry point of the `hybridavg` tool with subcommands simulate, compare
/// and absorb. Reports go to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hybridavg

#endif  // HYBRIDAVG_CLI_HPP
