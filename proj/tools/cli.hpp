#pragma once

#include <iosfwd>

namespace alaam::cli {

// Exit codes of the alaam command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNotConverged = 3;

// Runs one alaam invocation. argv[0] is the program name.
int runCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace alaam::cli
