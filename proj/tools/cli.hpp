#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tsdf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitInfeasible = 3;

/// Runs one tsdf-dse invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tsdf::cli
