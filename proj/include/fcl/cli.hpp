#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fcl {

// Exit codes of the command-line tool.
enum ExitCode : int { kExitTrue = 0, kExitFalse = 1, kExitUnknown = 2, kExitUsage = 3 };

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fcl
