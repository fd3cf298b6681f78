#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace genset::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitInfeasible = 3;

/// Runs one command line (args[0] is the program name). Results go to
/// --out if given, otherwise to `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace genset::cli
