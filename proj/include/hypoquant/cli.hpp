#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hypoquant::cli {

/// Exit statuses of the command-line tool.
inline constexpr int kOk = 0;
inline constexpr int kUsageError = 1;
inline constexpr int kDataError = 2;

/// Subcommands: phantom, binary, nonbinary, features, correlate, evaluate.
/// args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace hypoquant::cli
