#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dynex::cli {

inline constexpr int kOk = 0;
inline constexpr int kFailure = 1; // validation, convergence, pattern
inline constexpr int kUsage = 2;

// args[0] is the program name. Machine output goes to `out`, diagnostics to
// `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace dynex::cli
