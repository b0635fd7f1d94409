#include "cryf/conformal.hpp"

#include <cmath>
#include <sstream>

#include "cryf/errors.hpp"
#include "cryf/parallel.hpp"

namespace cryf {

namespace {

// u^e with exact repeated multiplication for small integer exponents.
double power(double u, double e) {
  if (e == std::trunc(e) && std::abs(e) <= 8.0) {
    const int k = static_cast<int>(std::abs(e));
    double r = 1.0;
    for (int s = 0; s < k; ++s) r *= u;
    return e < 0.0 ? 1.0 / r : r;
  }
  return std::pow(u, e);
}

void require_floor(const ConformalState& state, double u_floor, const char* what) {
  const double min_u = state.u().min();
  if (!(min_u > u_floor)) {
    std::ostringstream msg;
    msg << what << ": min u = " << min_u << " is not above the floor " << u_floor;
    throw PositivityError(msg.str(), min_u);
  }
}

}  // namespace

ConformalState::ConformalState(std::shared_ptr<const BaseGeometry> geom, ScalarField u, double t)
    : geom_(std::move(geom)), u_(std::move(u)), t_(t) {
  if (!geom_) throw ConfigError("ConformalState: null geometry");
  if (u_.size() != geom_->size()) {
    std::ostringstream msg;
    msg << "ConformalState: u has " << u_.size() << " values, grid has " << geom_->size();
    throw ConfigError(msg.str());
  }
  for (std::size_t p = 0; p < u_.size(); ++p) {
    if (!std::isfinite(u_[p]) || !(u_[p] > 0.0)) {
      std::ostringstream msg;
      msg << "ConformalState: conformal factor must be finite and positive, u = " << u_[p]
          << " at point " << p;
      throw PositivityError(msg.str(), u_[p]);
    }
  }
}

ScalarField webster_curvature(const ConformalState& state, double u_floor) {
  require_floor(state, u_floor, "webster_curvature");
  const BaseGeometry& geom = state.geometry();
  const double n = state.n();
  const double b_n = 2.0 + 2.0 / n;
  const double exponent = -1.0 - 2.0 / n;
  const ScalarField& u = state.u();
  const ScalarField& r_base = geom.base_curvature();
  ScalarField out = sub_laplacian_base(geom, u);
  parallel_for(out.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t p = lo; p < hi; ++p) {
      out[p] = power(u[p], exponent) * (-b_n * out[p] + r_base[p] * u[p]);
    }
  });
  return out;
}

ScalarField conformal_volume_element(const ConformalState& state) {
  const double exponent = (2.0 * state.n() + 2.0) / state.n();
  const ScalarField& u = state.u();
  ScalarField out(u.size());
  for (std::size_t p = 0; p < u.size(); ++p) out[p] = power(u[p], exponent);
  return out;
}

double integrate_conformal(const ConformalState& state, const ScalarField& f) {
  const ScalarField dv = conformal_volume_element(state);
  return inner_product(state.geometry(), f, dv);
}

ScalarField conformal_sub_laplacian(const ConformalState& state, const ScalarField& f) {
  require_floor(state, 0.0, "conformal_sub_laplacian");
  const ScalarField& u = state.u();
  ScalarField weight(u.size());
  for (std::size_t p = 0; p < u.size(); ++p) weight[p] = u[p] * u[p];
  ScalarField out = weighted_div_form(state.geometry(), weight, f);
  const double exponent = -(2.0 * state.n() + 2.0) / state.n();
  for (std::size_t p = 0; p < u.size(); ++p) out[p] *= power(u[p], exponent);
  return out;
}

ConformalState scale_state(const ConformalState& state, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    std::ostringstream msg;
    msg << "scale_state: sigma must be positive, got " << sigma;
    throw ConfigError(msg.str());
  }
  const double factor = std::pow(sigma, state.n() / 2.0);
  ScalarField u = state.u();
  for (double& v : u) v *= factor;
  return state.with_u(std::move(u));
}

ConformalState pullback_state(const ConformalState& state, long long m) {
  return state.with_u(pullback_z_shift(state.geometry(), state.u(), m));
}

}  // namespace cryf
