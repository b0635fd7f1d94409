#pragma once

// Conformal contact forms θ(t) = u^{2/n} θ over the base nilmanifold.

#include <memory>

#include "cryf/field.hpp"
#include "cryf/geometry.hpp"

namespace cryf {

inline constexpr double kDefaultUFloor = 1e-6;

/// A contact form θ(t) = u^{2/n}θ at flow time t. Copies share the (immutable) geometry.
class ConformalState {
 public:
  /// Throws PositivityError if u has a non-positive or non-finite entry, ConfigError on shape.
  ConformalState(std::shared_ptr<const BaseGeometry> geom, ScalarField u, double t = 0.0);

  const BaseGeometry& geometry() const noexcept { return *geom_; }
  const std::shared_ptr<const BaseGeometry>& geometry_ptr() const noexcept { return geom_; }
  const ScalarField& u() const noexcept { return u_; }
  double t() const noexcept { return t_; }
  int n() const noexcept { return geom_->n(); }

  ConformalState with_u(ScalarField u) const { return ConformalState(geom_, std::move(u), t_); }
  ConformalState with_time(double t) const { return ConformalState(geom_, u_, t); }

 private:
  std::shared_ptr<const BaseGeometry> geom_;
  ScalarField u_;
  double t_;
};

/// Webster scalar curvature of θ(t) from the CR Yamabe equation:
/// R = u^{-1-2/n} (−(2+2/n) Δ_θ u + R_θ u). Throws PositivityError if min u <= u_floor.
ScalarField webster_curvature(const ConformalState& state, double u_floor = kDefaultUFloor);

/// Density of dV_{θ(t)} against dV_θ: u^{(2n+2)/n}.
ScalarField conformal_volume_element(const ConformalState& state);

/// ∫ f dV_{θ(t)}.
double integrate_conformal(const ConformalState& state, const ScalarField& f);

/// Δ_{θ(t)} f = u^{-(2n+2)/n} · div_θ(u² ∇_θ f), computed in divergence form.
ScalarField conformal_sub_laplacian(const ConformalState& state, const ScalarField& f);

/// The state representing σ·θ(t): u ↦ σ^{n/2} u. Throws ConfigError unless σ > 0.
ConformalState scale_state(const ConformalState& state, double sigma);

/// Pullback by the central translation of m grid cells in z.
ConformalState pullback_state(const ConformalState& state, long long m);

}  // namespace cryf
