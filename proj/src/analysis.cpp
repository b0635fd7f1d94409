#include "cryf/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cryf/errors.hpp"
#include "cryf/flow.hpp"
#include "cryf/numeric.hpp"

namespace cryf {

namespace {

void require_window(std::span<const DiagnosticsRecord> w, const char* what) {
  if (w.size() != 3) {
    std::ostringstream msg;
    msg << what << ": need exactly three records, got " << w.size();
    throw ConfigError(msg.str());
  }
  const double left = w[1].t - w[0].t;
  const double right = w[2].t - w[1].t;
  if (!(left > 0.0 && right > 0.0) ||
      std::abs(left - right) > 1e-9 * std::max(std::abs(left), std::abs(right))) {
    std::ostringstream msg;
    msg << what << ": records must be equally spaced in time, got spacings " << left << " and "
        << right;
    throw ConfigError(msg.str());
  }
}

double l2_conformal(const ConformalState& state, const ScalarField& f) {
  ScalarField sq(f.size());
  for (std::size_t p = 0; p < f.size(); ++p) sq[p] = f[p] * f[p];
  return std::sqrt(std::max(0.0, integrate_conformal(state, sq)));
}

}  // namespace

DiagnosticsRecord diagnose(const ConformalState& state, double dt_used) {
  const ScalarField r = webster_curvature(state, 0.0);
  const ScalarField dv = conformal_volume_element(state);
  CompensatedSum vol_acc;
  CompensatedSum r_acc;
  CompensatedSum r2_acc;
  for (std::size_t p = 0; p < r.size(); ++p) {
    vol_acc.add(dv[p]);
    r_acc.add(r[p] * dv[p]);
    r2_acc.add(r[p] * r[p] * dv[p]);
  }
  const double w0 = state.geometry().cell_weight();
  const double n = state.n();

  DiagnosticsRecord rec;
  rec.t = state.t();
  rec.n = state.n();
  rec.vol = w0 * vol_acc.value();
  rec.intR = w0 * r_acc.value();
  rec.intR2 = w0 * r2_acc.value();
  rec.var = rec.intR2 * rec.vol - rec.intR * rec.intR;
  rec.E = rec.intR / std::pow(rec.vol, n / (n + 1.0));
  rec.dE_dt_formula = -n * rec.var / std::pow(rec.vol, (2.0 * n + 1.0) / (n + 1.0));
  rec.min_u = state.u().min();
  rec.min_R = r.min();
  rec.max_R = r.max();
  rec.dt_used = dt_used;
  return rec;
}

double yamabe_quantity(const ConformalState& state) {
  const double n = state.n();
  const ScalarField r = webster_curvature(state, 0.0);
  const double vol = integrate_conformal(state, state.geometry().constant(1.0));
  return integrate_conformal(state, r) / std::pow(vol, n / (n + 1.0));
}

double curvature_variance(const ConformalState& state) {
  const ScalarField r = webster_curvature(state, 0.0);
  ScalarField r2(r.size());
  for (std::size_t p = 0; p < r.size(); ++p) r2[p] = r[p] * r[p];
  const double vol = integrate_conformal(state, state.geometry().constant(1.0));
  const double int_r = integrate_conformal(state, r);
  return integrate_conformal(state, r2) * vol - int_r * int_r;
}

double dE_dt_formula(const ConformalState& state) {
  const double n = state.n();
  const ScalarField r = webster_curvature(state, 0.0);
  ScalarField r2(r.size());
  for (std::size_t p = 0; p < r.size(); ++p) r2[p] = r[p] * r[p];
  const double vol = integrate_conformal(state, state.geometry().constant(1.0));
  const double int_r = integrate_conformal(state, r);
  const double int_r2 = integrate_conformal(state, r2);
  const double numerator = -n * int_r2 * vol + n * int_r * int_r;
  return numerator / std::pow(vol, n / (n + 1.0) + 1.0);
}

TimeWindow sample_window(const ConformalState& state, double delta, double max_substep) {
  if (!(delta > 0.0)) throw ConfigError("sample_window: delta must be positive");
  const double substep = max_substep > 0.0 ? max_substep : 0.25 * delta;
  ConformalState before = integrate_fixed(state, -delta, substep);
  ConformalState after = integrate_fixed(state, delta, substep);
  std::array<DiagnosticsRecord, 3> records = {diagnose(before), diagnose(state), diagnose(after)};
  return TimeWindow{{std::move(before), state, std::move(after)}, records, delta};
}

double mean_curvature_rate_residual(std::span<const DiagnosticsRecord> window) {
  require_window(window, "mean_curvature_rate_residual");
  const double n = window[1].n;
  const double two_delta = window[2].t - window[0].t;
  const double rate = (window[2].intR - window[0].intR) / two_delta;
  return std::abs(rate + n * window[1].intR2) / std::max(1.0, n * window[1].intR2);
}

double volume_rate_residual(std::span<const DiagnosticsRecord> window) {
  require_window(window, "volume_rate_residual");
  const double n = window[1].n;
  const double two_delta = window[2].t - window[0].t;
  const double rate = (window[2].vol - window[0].vol) / two_delta;
  return std::abs(rate + (n + 1.0) * window[1].intR) /
         std::max(1.0, (n + 1.0) * std::abs(window[1].intR));
}

double dE_dt_finite_difference(std::span<const DiagnosticsRecord> window) {
  require_window(window, "dE_dt_finite_difference");
  return (window[2].E - window[0].E) / (window[2].t - window[0].t);
}

CurvatureEvolutionResult curvature_evolution(const ConformalState& state, double delta,
                                             CurvatureEvolutionForm form) {
  const double n = state.n();
  const double a = form.laplacian_coeff != 0.0 ? form.laplacian_coeff : n + 1.0;
  const double b = form.quadratic_coeff;
  const double substep = 0.25 * delta;
  const ScalarField r_minus = webster_curvature(integrate_fixed(state, -delta, substep), 0.0);
  const ScalarField r_plus = webster_curvature(integrate_fixed(state, delta, substep), 0.0);

  CurvatureEvolutionResult out;
  out.curvature = webster_curvature(state, 0.0);
  out.rhs = conformal_sub_laplacian(state, out.curvature);
  out.dR_dt = ScalarField(r_plus.size());
  ScalarField diff(r_plus.size());
  for (std::size_t p = 0; p < diff.size(); ++p) {
    const double r = out.curvature[p];
    out.rhs[p] = a * out.rhs[p] + b * r * r;
    out.dR_dt[p] = (r_plus[p] - r_minus[p]) / (2.0 * delta);
    diff[p] = out.dR_dt[p] - out.rhs[p];
  }
  const double scale = std::max(l2_conformal(state, out.dR_dt), l2_conformal(state, out.rhs));
  const double num = l2_conformal(state, diff);
  out.residual = scale > 0.0 ? num / scale : num;
  return out;
}

double curvature_evolution_residual(const ConformalState& state, double delta,
                                    CurvatureEvolutionForm form) {
  return curvature_evolution(state, delta, form).residual;
}

double normalized_curvature_variance(const DiagnosticsRecord& record) {
  // var / (∫R²dV·∫dV) lies in [0, 1] and is invariant under θ ↦ σθ.
  const double scale = record.intR2 * record.vol;
  if (!(scale > 0.0)) return 0.0;
  return std::max(0.0, record.var) / scale;
}

bool constancy_verdict(const ConformalState& state, double tol_rel) {
  return normalized_curvature_variance(diagnose(state)) <= tol_rel;
}

MonotonicityAudit monotonicity_audit(std::span<const DiagnosticsRecord> records, double slack) {
  MonotonicityAudit audit;
  for (std::size_t k = 0; k + 1 < records.size(); ++k) {
    const double e0 = records[k].E;
    const double rise = records[k + 1].E - e0;
    if (rise > slack * std::max(1.0, std::abs(e0))) {
      ++audit.violation_count;
      audit.worst_violation = std::max(audit.worst_violation, rise);
    }
  }
  return audit;
}

}  // namespace cryf
