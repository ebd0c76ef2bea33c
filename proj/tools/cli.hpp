#pragma once

#include <ostream>

namespace combwalk::cli {

/// Exit codes: 0 success, 2 usage/config error, 3 statistical failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitStatistical = 3;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace combwalk::cli
