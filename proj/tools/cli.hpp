#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace polis::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kBudgetRefused = 3, kRuntimeFailure = 4 };

/// Environment variable naming the default output directory. --out wins over
/// it, and it wins over run.output_dir from the config.
inline constexpr const char* kOutputDirEnv = "POLIS_OUTPUT_DIR";

/// Entry point behind the `polis` binary. args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace polis::cli
