#include "cryf/soliton.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cryf/analysis.hpp"
#include "cryf/errors.hpp"

namespace cryf {

namespace {

constexpr double kAlignmentTol = 1e-9;

double l2_conformal(const ConformalState& state, const ScalarField& f) {
  ScalarField sq(f.size());
  for (std::size_t p = 0; p < f.size(); ++p) sq[p] = f[p] * f[p];
  return std::sqrt(std::max(0.0, integrate_conformal(state, sq)));
}

}  // namespace

void SolitonFamily::validate() const {
  if (!sigma) throw ConfigError("soliton family: sigma is not set");
  if (sigma(0.0) != 1.0) {
    std::ostringstream msg;
    msg << "soliton family: sigma(0) must be 1, got " << sigma(0.0);
    throw ConfigError(msg.str());
  }
}

ZShift soliton_shift(const SolitonFamily& family, double t) {
  const double cells = family.psi_rate * t * family.base.geometry().grid().nz;
  const double nearest = std::round(cells);
  const bool aligned = std::abs(cells - nearest) <= kAlignmentTol * std::max(1.0, std::abs(cells));
  if (!aligned && !family.snap_shifts) {
    std::ostringstream msg;
    msg << "soliton family: shift psi_rate*t*N_z = " << cells << " at t = " << t
        << " is not a whole number of grid cells (enable snapping to round it)";
    throw ConfigError(msg.str());
  }
  return {static_cast<long long>(nearest), !aligned};
}

ConformalState soliton_state(const SolitonFamily& family, double t) {
  family.validate();
  const double sigma = family.sigma(t);
  if (!(sigma > 0.0)) {
    std::ostringstream msg;
    msg << "soliton family: sigma(" << t << ") = " << sigma << " is not positive";
    throw ConfigError(msg.str());
  }
  const ZShift shift = soliton_shift(family, t);
  const ConformalState pulled = pullback_state(family.base, shift.cells);
  return scale_state(pulled, sigma).with_time(family.base.t() + t);
}

double soliton_invariance_check(std::span<const ConformalState> states) {
  if (states.empty()) return 0.0;
  const double e0 = yamabe_quantity(states.front());
  double worst = 0.0;
  for (const ConformalState& s : states) worst = std::max(worst, std::abs(yamabe_quantity(s) - e0));
  return worst;
}

double soliton_invariance_check(const SolitonFamily& family, std::span<const double> times) {
  std::vector<ConformalState> states;
  states.reserve(times.size() + 1);
  states.push_back(soliton_state(family, 0.0));
  for (double t : times) states.push_back(soliton_state(family, t));
  return soliton_invariance_check(states);
}

double flow_residual_of_family(const SolitonFamily& family, double t, double delta) {
  if (!(delta > 0.0)) throw ConfigError("flow_residual_of_family: delta must be positive");
  const ConformalState before = soliton_state(family, t - delta);
  const ConformalState now = soliton_state(family, t);
  const ConformalState after = soliton_state(family, t + delta);
  const ScalarField r = webster_curvature(now, 0.0);
  const double half_n = 0.5 * now.n();

  ScalarField rate(r.size());
  ScalarField flow_rhs(r.size());
  ScalarField diff(r.size());
  for (std::size_t p = 0; p < r.size(); ++p) {
    rate[p] = (after.u()[p] - before.u()[p]) / (2.0 * delta);
    flow_rhs[p] = -half_n * r[p] * now.u()[p];
    diff[p] = rate[p] - flow_rhs[p];
  }
  const double scale = std::max(l2_conformal(now, rate), l2_conformal(now, flow_rhs));
  const double num = l2_conformal(now, diff);
  return scale > 0.0 ? num / scale : num;
}

std::string_view to_string(SolitonVerdict verdict) {
  switch (verdict) {
    case SolitonVerdict::ConstantCurvature:
      return "constant curvature";
    case SolitonVerdict::NotAFlowSolution:
      return "not a flow solution";
    case SolitonVerdict::TheoremViolation:
      return "THEOREM VIOLATION";
    case SolitonVerdict::NotSolitonForm:
      return "E not invariant (not soliton form)";
  }
  return "unknown";
}

HarnessReport soliton_theorem_harness(const SolitonFamily& family, std::span<const double> times,
                                      const HarnessOptions& options) {
  family.validate();
  HarnessReport report;

  std::vector<ConformalState> states;
  states.reserve(times.size() + 1);
  states.push_back(soliton_state(family, 0.0));
  for (double t : times) {
    report.any_snapped = report.any_snapped || soliton_shift(family, t).snapped;
    states.push_back(soliton_state(family, t));
  }

  const double e0 = yamabe_quantity(states.front());
  report.invariance_deviation = soliton_invariance_check(states) / std::max(1.0, std::abs(e0));
  for (const ConformalState& s : states) {
    report.max_normalized_variance =
        std::max(report.max_normalized_variance, normalized_curvature_variance(diagnose(s)));
  }
  if (report.invariance_deviation > options.invariance_tol) {
    report.verdict = SolitonVerdict::NotSolitonForm;
    return report;
  }

  for (double t : times) {
    report.max_flow_residual =
        std::max(report.max_flow_residual, flow_residual_of_family(family, t, options.delta));
  }
  if (report.max_flow_residual > options.flow_tol) {
    report.verdict = SolitonVerdict::NotAFlowSolution;
    return report;
  }

  report.verdict = report.max_normalized_variance <= options.var_tol
                       ? SolitonVerdict::ConstantCurvature
                       : SolitonVerdict::TheoremViolation;
  return report;
}

}  // namespace cryf
