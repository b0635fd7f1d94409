#pragma once

// `key = value` run configuration with `[section]` headers. `#` starts a comment. Unknown
// sections or keys, duplicate keys, and out-of-range values are errors addressed by line and
// column.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "cryf/flow.hpp"
#include "cryf/geometry.hpp"
#include "cryf/initial_data.hpp"

namespace cryf {

struct AnalysisConfig {
  double delta = 1e-4;
  double var_tol = 1e-8;
  // check-identities bounds, calibrated on single_mode_y (ε = 0.1) at 16³ with δ = 1e-4.
  double volume_rate_bound = 0.02;
  double mean_curvature_rate_bound = 0.02;
  double curvature_evolution_bound = 0.01;
  double dEdt_bound = 0.01;
  double invariance_bound = 1e-12;
  double commute_bound = 1e-15;
  // Coefficient of R² in the curvature evolution check. 1 is the identity; anything else is a
  // negative control.
  double r2_coefficient = 1.0;
  // convergence-study
  std::vector<int> grids = {8, 16, 32};
  double convergence_delta = 1e-5;
  double min_order_untwisted = 1.8;
  double min_order_twisted = 0.9;
};

enum class SigmaKind { Constant, Linear, Exponential };

struct SolitonConfig {
  SigmaKind sigma = SigmaKind::Constant;  // 1, 1 + rate·t, exp(rate·t)
  double sigma_rate = 0.0;
  double psi_rate = 0.0;
  std::vector<double> times = {0.001, 0.002, 0.003};
  double delta = 1e-3;
  double flow_tol = 1e-6;
  double var_tol = 1e-6;
  bool snap = false;
  bool sweep = false;
};

struct OutputConfig {
  std::string csv = "diagnostics.csv";
  std::string report = "report.txt";
  std::string residuals = "residuals.txt";
  std::string orders = "orders.txt";
  std::string verdicts = "verdicts.txt";
  std::string snapshot_prefix = "snapshot";
};

struct RunConfig {
  GridSpec grid;
  InitialData initial;
  FlowConfig flow;
  AnalysisConfig analysis;
  SolitonConfig soliton;
  OutputConfig output;
};

std::string_view to_string(SigmaKind kind);

/// Parses and validates. Throws ConfigError with "line L, column C" in the message.
RunConfig parse_config(std::string_view text);

/// Reads a file and parses it. Throws ConfigError if the file cannot be read.
RunConfig load_config(const std::filesystem::path& path);

}  // namespace cryf
