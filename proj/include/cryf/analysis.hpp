#pragma once

// The monotone quantity E = ∫R dV / (∫dV)^{n/(n+1)} and residual checks for the time-derivative
// identities it rests on.

#include <array>
#include <span>

#include "cryf/conformal.hpp"

namespace cryf {

struct DiagnosticsRecord {
  double t = 0.0;
  double E = 0.0;
  double vol = 0.0;
  double intR = 0.0;
  double intR2 = 0.0;
  double var = 0.0;            // intR2·vol − intR²
  double dE_dt_formula = 0.0;  // −n·var / vol^{n/(n+1)+1}
  double min_u = 0.0;
  double min_R = 0.0;
  double max_R = 0.0;
  double dt_used = 0.0;
  int n = 1;
};

/// All scalar diagnostics of a state in one pass over the grid.
DiagnosticsRecord diagnose(const ConformalState& state, double dt_used = 0.0);

double yamabe_quantity(const ConformalState& state);

/// ∫R²dV·∫dV − (∫R dV)²; non-negative up to rounding, zero iff R is constant.
double curvature_variance(const ConformalState& state);

/// d/dt E along the flow: (−n·∫R²dV·∫dV + n·(∫R dV)²) / (∫dV)^{n/(n+1)+1}.
double dE_dt_formula(const ConformalState& state);

/// Records at t−δ, t, t+δ obtained by accurate integration from a state at t.
struct TimeWindow {
  std::array<ConformalState, 3> states;
  std::array<DiagnosticsRecord, 3> records;
  double delta;
};

/// Integrates the flow backward and forward by δ with RK4 sub-steps no larger than
/// min(δ, max_substep) and a stability-derived bound.
TimeWindow sample_window(const ConformalState& state, double delta, double max_substep = 0.0);

/// |(intR(t+δ) − intR(t−δ))/(2δ) + n·intR2(t)| / max(1, n·intR2(t)).
/// Throws ConfigError unless the three records are equally spaced.
double mean_curvature_rate_residual(std::span<const DiagnosticsRecord> window);

/// |(vol(t+δ) − vol(t−δ))/(2δ) + (n+1)·intR(t)| / max(1, (n+1)·|intR(t)|).
double volume_rate_residual(std::span<const DiagnosticsRecord> window);

/// Centered finite difference (E(t+δ) − E(t−δ))/(2δ).
double dE_dt_finite_difference(std::span<const DiagnosticsRecord> window);

/// Coefficients of the right-hand side ∂R/∂t = a·Δ_{θ(t)}R + b·R². The defaults are a = n+1,
/// b = 1; other values only serve as negative controls.
struct CurvatureEvolutionForm {
  double laplacian_coeff = 0.0;  // 0 selects n+1
  double quadratic_coeff = 1.0;
};

struct CurvatureEvolutionResult {
  double residual = 0.0;         // normalized L² norm (dV_{θ(t)}) of ∂R/∂t − rhs
  ScalarField dR_dt;             // centered difference in time
  ScalarField rhs;               // a·Δ_{θ(t)}R + b·R²
  ScalarField curvature;         // R at t
};

CurvatureEvolutionResult curvature_evolution(const ConformalState& state, double delta,
                                             CurvatureEvolutionForm form = {});

double curvature_evolution_residual(const ConformalState& state, double delta,
                                    CurvatureEvolutionForm form = {});

/// var / (intR2·vol), the Cauchy–Schwarz defect in [0, 1]; 0 when R ≡ 0.
double normalized_curvature_variance(const DiagnosticsRecord& record);

/// True iff normalized_curvature_variance <= tol_rel. Invariant under scale_state.
bool constancy_verdict(const ConformalState& state, double tol_rel = 1e-8);

struct MonotonicityAudit {
  int violation_count = 0;
  double worst_violation = 0.0;  // largest E(t_{k+1}) − E(t_k) among violations
};

/// Counts k with E(t_{k+1}) > E(t_k) + slack·max(1, |E(t_k)|).
MonotonicityAudit monotonicity_audit(std::span<const DiagnosticsRecord> records,
                                     double slack = 1e-8);

}  // namespace cryf
