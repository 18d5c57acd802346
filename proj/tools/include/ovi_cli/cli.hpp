#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ovi::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  ///< validation, configuration or I/O failure
inline constexpr int kExitUsage = 2;    ///< unknown subcommand or flag

/// Runs one subcommand. `args` excludes the program name. Diagnostics go to `err`, short
/// progress lines to `out`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ovi::cli
