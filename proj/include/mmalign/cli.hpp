#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mmalign::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitData = 3;

/// Runs the `mmalign` command line; args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mmalign::cli
