#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace crowd {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitInternalError = 2;

// Subcommands: infer, simulate, evaluate, experiment. `args` excludes the
// program name. Returns the process exit code.
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int cli_dispatch(int argc, char** argv);

}  // namespace crowd
