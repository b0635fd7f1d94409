#pragma once

// Unnormalized CR Yamabe flow ∂θ/∂t = −R θ in conformal-factor form ∂u/∂t = −(n/2) R u.

#include <string_view>
#include <vector>

#include "cryf/analysis.hpp"
#include "cryf/conformal.hpp"

namespace cryf {

struct FlowConfig {
  double t_end = 0.05;
  double dt_init = 1e-5;
  double dt_min = 1e-12;
  double dt_max = 1e-3;
  double safety = 0.9;
  double err_tol = 1e-8;
  double u_floor = kDefaultUFloor;
  int record_every = 1;
  int snapshot_every = 0;

  /// Throws ConfigError on violated invariants.
  void validate() const;
};

enum class Termination { ReachedTEnd, PositivityFloor, StepUnderflow };

std::string_view to_string(Termination termination);

struct Snapshot {
  double t;
  ScalarField u;
};

struct Trajectory {
  std::vector<DiagnosticsRecord> records;
  std::vector<Snapshot> snapshots;
  Termination termination = Termination::ReachedTEnd;
  long accepted_steps = 0;
  long rejected_steps = 0;
};

/// −(n/2)·R·u.
ScalarField time_derivative(const ConformalState& state, double u_floor = kDefaultUFloor);

/// Classical four-stage step. Throws PositivityError if any stage leaves u above the floor.
ConformalState step_rk4(const ConformalState& state, double dt, double u_floor = kDefaultUFloor);

struct AdaptiveStep {
  ConformalState state;
  double dt_used;
  double dt_next;
  double err_est;
  int rejected = 0;  // attempts discarded before acceptance
};

/// Relative L∞ discrepancy between one step of dt and two steps of dt/2.
double step_doubling_error(const ConformalState& state, double dt, double u_floor = kDefaultUFloor);

/// Step doubling with retries. Accepts the two-half-step result once the relative L∞
/// discrepancy is within err_tol. Throws StepUnderflowError if dt would drop below dt_min.
AdaptiveStep step_adaptive(const ConformalState& state, double dt_try, const FlowConfig& config);

/// Largest dt for which explicit RK4 is stable on the linearized flow, from a Gershgorin bound.
double stable_dt_estimate(const ConformalState& state);

/// Integrates by `duration` (either sign) with equal RK4 sub-steps no larger than max_substep
/// and 0.5·stable_dt_estimate.
ConformalState integrate_fixed(const ConformalState& state, double duration, double max_substep,
                               double u_floor = kDefaultUFloor);

Trajectory run_flow(const ConformalState& initial, const FlowConfig& config);

}  // namespace cryf
