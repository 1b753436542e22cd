#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace robplan::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitSolverFailure = 1;
inline constexpr int kExitConfigError = 2;

/// Runs one command line (without the program name). Results go to `out`
/// unless --out is given; diagnostics and JSON error objects go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace robplan::cli
