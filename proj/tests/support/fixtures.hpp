#pragma once

#include <memory>
#include <vector>

#include "cryf/conformal.hpp"
#include "cryf/initial_data.hpp"
#include "support/oracles.hpp"

namespace fixture {

inline std::shared_ptr<const cryf::BaseGeometry> geometry(int n) {
  return std::make_shared<const cryf::BaseGeometry>(cryf::GridSpec{n, n, n});
}

inline cryf::ConformalState single_mode_y(int n, double eps) {
  auto g = geometry(n);
  cryf::InitialData d;
  d.preset = cryf::Preset::SingleModeY;
  d.epsilon = eps;
  return cryf::ConformalState(g, cryf::make_initial(*g, d));
}

inline cryf::ConformalState random_state(int n, std::uint64_t seed, double amplitude = 0.3, int passes = 8) {
  auto g = geometry(n);
  return cryf::ConformalState(g, cryf::random_smooth(*g, seed, amplitude, passes));
}

inline oracle::Grid grid_of(const cryf::ConformalState& s) {
  const auto& g = s.geometry().grid();
  return {g.nx, g.ny, g.nz};
}

inline std::vector<double> values(const cryf::ScalarField& f) { return {f.begin(), f.end()}; }

}  // namespace fixture
