#pragma once

#include <iosfwd>

namespace fhn {

enum ExitCode : int {
  kExitOk = 0,
  kExitVerificationFailed = 1,
  kExitConfigError = 2,
  kExitIntegrationAbort = 3,
};

/// Entry point of the `fhnctl` tool. Subcommands: reference, reentry, track,
/// diffusion-test, converge, verify and run (dispatch on the config's
/// scenario key).
int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fhn
