#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "config.hpp"
#include "polgeo/error.hpp"

namespace polgeo::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitOther = 1,
  kExitConfig = 2,
  kExitInfeasible = 3,
  kExitStalled = 4,
  kExitInternal = 5,
};

int exit_code_for(ErrorKind kind) noexcept;

/// Runs one validated experiment and writes trace.jsonl, summary.json and,
/// for landscape/connectivity, grid.csv into out_dir. Engine errors are
/// recorded in summary.json; the return value is the process exit code.
int run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

/// Parse + run as invoked from the command line; configuration errors are
/// written to summary.json (when out_dir is writable) and to stderr.
int run_command(const std::string& task, const std::string& config_path, const std::filesystem::path& out_dir,
                std::optional<std::uint64_t> seed);

}  // namespace polgeo::cli
