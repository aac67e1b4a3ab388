#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tuplesieve::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitCapacity = 3;

// Runs one subcommand. args excludes the program name. The summary line goes
// to `out`, diagnostics to `err`; reports are written under --out.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tuplesieve::cli
