#pragma once

// Drivers behind the `cryf` subcommands. Each writes its outputs under `out_dir` and returns a
// process exit code: 0 success, 1 verification failure, 2 environment or configuration failure.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cryf/config.hpp"
#include "cryf/soliton.hpp"

namespace cryf {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailure = 1;
inline constexpr int kExitEnvironmentFailure = 2;

struct OutputTarget {
  std::filesystem::path dir;
  bool overwrite = false;
};

int cmd_run_flow(const RunConfig& config, const OutputTarget& out, std::ostream& log);
int cmd_check_identities(const RunConfig& config, const OutputTarget& out, std::ostream& log);
int cmd_convergence_study(const RunConfig& config, const OutputTarget& out, std::ostream& log);
int cmd_soliton_check(const RunConfig& config, const OutputTarget& out, std::ostream& log);

/// Loads the config and dispatches by subcommand name, mapping every exception to exit 2.
int run_command(const std::string& name, const std::filesystem::path& config_path,
                const OutputTarget& out, std::ostream& log);

// Building blocks shared with tests and the Python module.

struct IdentityResidual {
  std::string name;
  double value;
  double bound;
  bool pass() const { return value <= bound; }
};

std::vector<IdentityResidual> identity_residuals(const RunConfig& config);

struct OrderRow {
  std::string name;
  bool twisted;  // twisted, variable-coefficient, or time-coupled: uses the lower minimum
  std::vector<int> grids;
  std::vector<double> errors;
  std::vector<double> orders;  // one per consecutive grid pair
};

/// Throws ConfigError if fewer than two grids are supplied.
std::vector<OrderRow> convergence_rows(const RunConfig& config);

struct NamedFamily {
  std::string label;
  SolitonFamily family;
};

/// The family described by the [soliton] block, or the full sweep if `sweep = true`.
std::vector<NamedFamily> soliton_families(const RunConfig& config);

}  // namespace cryf
