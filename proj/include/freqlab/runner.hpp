#pragma once

#include <string>

#include "freqlab/config.hpp"

namespace freqlab {

/// Exit codes shared by the CLI and the end-to-end tests.
enum ExitCode {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitUsage = 2,
  kExitNonconvergence = 3,
};

/// Runs one CLI command ("describe", "sweep", "verify", "solve",
/// "doubling") against a parsed config. Artifacts are written under
/// out_dir (created if missing); dump_grid overrides the config's grid
/// output path. Returns an ExitCode; diagnostics go to the error stream.
int run_command(const std::string& command, const ExperimentConfig& config,
                const std::string& out_dir, const std::string& dump_grid = "");

}  // namespace freqlab
