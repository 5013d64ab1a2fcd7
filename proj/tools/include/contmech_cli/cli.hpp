#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace contmech::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

// Environment variable naming the default output directory of `experiment`.
inline constexpr const char* kOutDirEnv = "CONTMECH_OUT_DIR";

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace contmech::cli
