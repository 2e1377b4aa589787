#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ttedepth::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Runs one command line (args exclude the program name). Reports go to `out`
/// or the --out path, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace ttedepth::cli
