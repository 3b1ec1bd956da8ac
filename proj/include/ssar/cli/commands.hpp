#pragma once

#include <filesystem>
#include <string>

#include "ssar/cli/config.hpp"

namespace ssar::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitInput = 2,
    kExitConfig = 3,
    kExitDivergence = 4,
};

// Named weight masks: "ssar" (unchanged), "naive" (gamma=theta=0),
// "mmd" (beta=theta=0). Throws ConfigError for other names.
LossWeights apply_preset(const std::string& preset, const LossWeights& base);

// Resolution order: run.output_dir, then $SSAR_OUTPUT_DIR/<command>,
// then ./ssar_output/<command>.
std::filesystem::path resolve_output_dir(const ExperimentConfig& config, const std::string& command);

// Source and target sessions named by the config (files or synthetic days).
struct SessionPair {
    Session source;
    Session target;
};
SessionPair load_sessions(const ExperimentConfig& config);

// Parses argv, runs one subcommand and returns the process exit code. Errors
// are reported as a single JSON line on stderr.
int run(int argc, char** argv);

}  // namespace ssar::cli
