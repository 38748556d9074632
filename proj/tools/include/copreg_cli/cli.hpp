#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace copreg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitNumeric = 4;

// Runs one `copreg` command. `args` excludes the program name. Returns the
// process exit code; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace copreg::cli
