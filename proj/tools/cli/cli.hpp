#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cpd::cli {

inline constexpr const char* kSchemaVersion = "1.0";

enum ExitCode : int { kSuccess = 0, kRuntimeError = 1, kUsageError = 2 };

/// Runs the command line tool. Output documents go to `out` unless --output
/// names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cpd::cli
