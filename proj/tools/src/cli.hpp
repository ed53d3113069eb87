#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sigdrift::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitChange = 2;

// Entry point of the `sigdrift` tool; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sigdrift::cli
