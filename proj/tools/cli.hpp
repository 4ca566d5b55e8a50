#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace octacomp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitFindings = 2;

// Runs one command line (args excludes the program name). Every path writes
// a single JSON document to `out`; `in` backs inputs given as "-" or omitted.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out);

}  // namespace octacomp::cli
