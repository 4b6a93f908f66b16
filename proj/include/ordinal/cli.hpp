#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ordinal {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitData = 2, kExitInternal = 3 };

/// Entry point of the `ordinal` tool. args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ordinal
