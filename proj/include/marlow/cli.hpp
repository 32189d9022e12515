#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace marlow::cli {

inline constexpr const char* kVersion = "0.1.0";

/**
 * Entry point of the `marlow` tool.
 *
 * Subcommands: degrade, complete, evaluate, bench. Machine-readable output goes
 * to `out` (or files); progress and diagnostics go to `err`. Returns the
 * process exit code: 0 iff every requested output was written.
 */
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace marlow::cli
