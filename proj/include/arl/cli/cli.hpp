#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace arl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;    // bad arguments or configuration
inline constexpr int kExitRuntime = 2;  // I/O or other runtime failure

/// Entry point of the `arl` tool: `arl train|baseline|replay|report [--config PATH]
/// [--seed N] [--out DIR] [--scale desk|paper]`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace arl::cli
