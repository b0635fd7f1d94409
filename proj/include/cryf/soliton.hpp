#pragma once

// Self-similar families θ(t) = σ(t)·ψ_t*θ with ψ_t a central (Reeb) translation, and a
// decision procedure that replays the constant-curvature argument on them.

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cryf/conformal.hpp"

namespace cryf {

struct SolitonFamily {
  ConformalState base;                  // θ at t = 0
  std::function<double(double)> sigma;  // σ(t) > 0, σ(0) = 1
  double psi_rate = 0.0;                // ψ_t translates z by psi_rate·t
  bool snap_shifts = false;             // round non-aligned shifts instead of failing

  /// Throws ConfigError unless σ(0) = 1.
  void validate() const;
};

struct ZShift {
  long long cells = 0;
  bool snapped = false;  // true if psi_rate·t·N_z was not an integer and got rounded
};

/// Grid shift realizing ψ_t. Throws ConfigError for a non-aligned shift without snapping.
ZShift soliton_shift(const SolitonFamily& family, double t);

/// scale_state(pullback_state(base, shift(t)), σ(t)) at time t.
ConformalState soliton_state(const SolitonFamily& family, double t);

/// max_t |E(t) − E(t₀)| over the given states (t₀ = first state).
double soliton_invariance_check(std::span<const ConformalState> states);
double soliton_invariance_check(const SolitonFamily& family, std::span<const double> times);

/// Normalized L² norm of (u(t+δ) − u(t−δ))/(2δ) + (n/2)·R(t)·u(t) along the family.
double flow_residual_of_family(const SolitonFamily& family, double t, double delta);

enum class SolitonVerdict { ConstantCurvature, NotAFlowSolution, TheoremViolation, NotSolitonForm };

std::string_view to_string(SolitonVerdict verdict);

struct HarnessOptions {
  double delta = 1e-3;
  double flow_tol = 1e-6;
  double var_tol = 1e-6;
  double invariance_tol = 1e-12;
};

struct HarnessReport {
  SolitonVerdict verdict = SolitonVerdict::NotSolitonForm;
  double invariance_deviation = 0.0;  // max |E(t) − E(0)| / max(1, |E(0)|)
  double max_flow_residual = 0.0;
  double max_normalized_variance = 0.0;
  bool any_snapped = false;
};

/// (a) E constant along the family; (b) if the family solves the flow at every sampled time,
/// the curvature must be constant there. A large variance under (a) and (b) is reported as
/// TheoremViolation.
HarnessReport soliton_theorem_harness(const SolitonFamily& family, std::span<const double> times,
                                      const HarnessOptions& options = {});

}  // namespace cryf
