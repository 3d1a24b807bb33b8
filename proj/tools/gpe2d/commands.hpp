#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "gpe2d/run_config.hpp"

namespace gpe2d::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 1,
  kNonConvergence = 2,
  kNumericalFailure = 3,
  kSingularCoupling = 4,
};

/// Parsed command line of one invocation.
struct Invocation {
  std::string command;  // solve | excited | tf | sweep | quadcheck
  std::optional<std::filesystem::path> config;
  std::optional<std::filesystem::path> out;
  std::optional<std::string> kappas;  // "a,b,c"
  std::optional<std::string> modes;   // "l1,l2[,l1,l2]"
};

/// Runs one command and maps library errors onto exit codes. Diagnostics go
/// to stderr.
int run(const Invocation& inv);

int cmd_solve(const RunConfig& config);
int cmd_excited(const RunConfig& config);
int cmd_tf(const RunConfig& config);
int cmd_sweep(const RunConfig& config);
int cmd_quadcheck(const RunConfig& config);

/// Worker count for grid exports: GPE2D_THREADS, 0 or unset = hardware.
unsigned export_threads();

}  // namespace gpe2d::cli
