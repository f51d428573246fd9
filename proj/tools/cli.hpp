#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace catbranch::cli {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitRuntime = 2, kExitVerdict = 3 };

/// Parses argv, runs one subcommand and writes its output to --out (or `out`). Diagnostics go to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int dispatch(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace catbranch::cli
