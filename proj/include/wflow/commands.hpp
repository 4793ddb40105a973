#pragma once

#include <filesystem>
#include <vector>

#include "wflow/config.hpp"
#include "wflow/report.hpp"

namespace wflow {

struct CommandResult {
  int exit_code = 0;
  std::vector<std::filesystem::path> files;
  Json summary;
};

// Exit codes shared by the subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitNotCertified = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNonconvergence = 3;
inline constexpr int kExitRefused = 4;
inline constexpr int kExitFailure = 5;

// Fraction of series evaluations allowed to stop at eta_max unconverged.
inline constexpr double kMaxNonconvergedFraction = 0.01;

// Current field, divergence and Liouvillianity on the grid. Writes
// flow_field.{csv,json} and flow_field_summary.json.
CommandResult cmd_flow_field(const RunConfig& config);

// Three-way stationarity certificate plus zero-mode residual. Writes
// camouflage_verify.json. Exit 0 iff both checks pass.
CommandResult cmd_camouflage_verify(const RunConfig& config);

// One row per (zeta, gamma) of the simplified family. Writes
// scan.{csv,json}. Row failures are recorded in the row.
CommandResult cmd_scan(const RunConfig& config);

// Pseudospectral residual of the camouflage Hamiltonian on the matched
// squeezed vacuum. Writes zero_mode.json.
CommandResult cmd_zero_mode(const RunConfig& config);

}  // namespace wflow
