#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rfscreen::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitCanaryLeak = 3;  // `audit` only

// Runs one command line (args[0] is the program name). Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rfscreen::cli
