#pragma once

namespace rotjac {

inline constexpr const char* kToolVersion = "rotjac 0.1.0";

/// Dispatches argv to a subcommand and runs it.
/// Exit codes: 0 success, 1 argument error, 2 numerical or I/O failure,
/// 3 built-in assertion failure.
int run_cli(int argc, const char* const* argv);

}  // namespace rotjac
