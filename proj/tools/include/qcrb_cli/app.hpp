#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qcrb::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitSpecError = 2;
inline constexpr int kExitNotOptimal = 3;
inline constexpr int kExitRuntimeError = 4;

// Runs one qcrb-lab invocation. args excludes the program name. Results go
// to `out` (or the --out file), diagnostics to `err`. Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qcrb::cli
