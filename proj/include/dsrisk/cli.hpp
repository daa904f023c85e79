#ifndef DSRISK_CLI_HPP
#define DSRISK_CLI_HPP

#include <map>
#include <ostream>
#include <span>
#include <string>

namespace dsrisk::cli {

enum ExitCode : int {
    kSuccess = 0,
    kMismatch = 1,
    kUsage = 2,
    kDataError = 3,
};

using Environment = std::map<std::string, std::string>;

/// Environment key overriding the default 600 s block period (a --tau0 flag
/// takes precedence).
inline constexpr const char* kTau0Key = "DSRISK_TAU0";

/// Execute one invocation. args[0] is the program name. Results go to out,
/// diagnostics and usage text to err.
int run(std::span<const std::string> args, const Environment& env, std::ostream& out,
        std::ostream& err);

}  // namespace dsrisk::cli

#endif  // DSRISK_CLI_HPP
