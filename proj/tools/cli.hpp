#ifndef DARKWORLDS_TOOLS_CLI_HPP
#define DARKWORLDS_TOOLS_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace darkworlds::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Runs one invocation: args exclude the program name.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace darkworlds::cli

#endif  // DARKWORLDS_TOOLS_CLI_HPP
