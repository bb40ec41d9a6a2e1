// Command-line front end: run, sweep, cluster and validate.
#pragma once

#include <iosfwd>

namespace qqmr {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

/// Parses arguments and executes one subcommand. Usage and results go to
/// `out`, diagnostics to `err`.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qqmr
