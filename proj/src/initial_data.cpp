#include "cryf/initial_data.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace cryf {

std::string_view to_string(Preset preset) {
  switch (preset) {
    case Preset::Constant:
      return "constant";
    case Preset::SingleModeY:
      return "single_mode_y";
    case Preset::SingleModeX:
      return "single_mode_x";
    case Preset::RandomSmooth:
      return "random_smooth";
  }
  return "unknown";
}

std::optional<Preset> parse_preset(std::string_view name) {
  for (Preset p : {Preset::Constant, Preset::SingleModeY, Preset::SingleModeX, Preset::RandomSmooth}) {
    if (to_string(p) == name) return p;
  }
  return std::nullopt;
}

ScalarField random_smooth(const BaseGeometry& geom, std::uint64_t seed, double amplitude,
                          int passes) {
  std::mt19937_64 gen(seed);
  ScalarField u(geom.size());
  for (double& v : u) {
    const double unit = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    v = 1.0 + amplitude * (2.0 * unit - 1.0);
  }
  ScalarField next(geom.size());
  for (int pass = 0; pass < passes; ++pass) {
    for (std::size_t p = 0; p < u.size(); ++p) {
      double acc = u[p];
      for (int axis = 0; axis < 3; ++axis) {
        acc += u[geom.neighbor(p, axis, +1)] + u[geom.neighbor(p, axis, -1)];
      }
      next[p] = acc / 7.0;
    }
    std::swap(u, next);
  }
  for (double& v : u) v = std::max(v, kRandomSmoothFloor);
  return u;
}

ScalarField make_initial(const BaseGeometry& geom, const InitialData& data) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  switch (data.preset) {
    case Preset::Constant:
      return geom.constant(data.c);
    case Preset::SingleModeY:
      return geom.sample([&](double, double y, double) {
        return data.c * (1.0 + data.epsilon * std::sin(two_pi * y));
      });
    case Preset::SingleModeX:
      return geom.sample([&](double x, double, double) {
        return data.c * (1.0 + data.epsilon * std::sin(two_pi * x));
      });
    case Preset::RandomSmooth: {
      ScalarField u = random_smooth(geom, data.seed, data.amplitude, data.smoothing_passes);
      for (double& v : u) v *= data.c;
      return u;
    }
  }
  return geom.constant(data.c);
}

}  // namespace cryf
