#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace whitney::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitGateFailed = 2;

/// Runs one invocation. `args` excludes the program name. Messages for
/// failures go to `err` prefixed with E:<module>:<check>.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// argv front end over run().
int run(int argc, const char* const* argv);

} // namespace whitney::cli
