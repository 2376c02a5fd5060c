#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace magenta::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsageOrValidation = 1;
inline constexpr int kCheckFailed = 2;

// argv[0] is the program name. Output goes to `out`, diagnostics to `err`.
int dispatch(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace magenta::cli
