#pragma once

#include <iosfwd>

namespace attr {

// Exit codes
inline constexpr int kOk = 0;
inline constexpr int kConfigError = 1;
inline constexpr int kAllFailed = 2;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace attr
