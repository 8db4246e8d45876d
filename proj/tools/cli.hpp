#pragma once

#include <string>
#include <vector>

namespace reram::cli {

// Exit codes, one per failure class.
enum ExitCode : int {
  kOk = 0,
  kUsage = 64,        // unknown flags, bad option values
  kSchema = 65,       // input file violates its schema
  kNoInput = 66,      // unreadable input file
  kComputation = 70,  // a pipeline stage failed
  kCannotWrite = 73,  // output could not be written
};

/// Runs one subcommand. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args);

}  // namespace reram::cli
