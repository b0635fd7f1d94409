#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "cryf/field.hpp"
#include "cryf/geometry.hpp"

namespace cryf {

enum class Preset { Constant, SingleModeY, SingleModeX, RandomSmooth };

std::string_view to_string(Preset preset);
std::optional<Preset> parse_preset(std::string_view name);

struct InitialData {
  Preset preset = Preset::Constant;
  double c = 1.0;          // overall level
  double epsilon = 0.1;    // single-mode amplitude, |epsilon| < 1
  std::uint64_t seed = 1;  // random_smooth
  double amplitude = 0.3;  // random_smooth noise half-width, in [0, 0.9]
  int smoothing_passes = 8;
};

/// Lower clamp applied by random_smooth after smoothing.
inline constexpr double kRandomSmoothFloor = 0.05;

/// random_smooth: mt19937_64(seed) draws, mapped to [0,1) as (draw >> 11)·2⁻⁵³, give
/// 1 + a·(2U − 1) at each point in flat-index order; then `passes` rounds of the 7-point
/// average (self plus the six canonical neighbours); then max(·, kRandomSmoothFloor).
ScalarField random_smooth(const BaseGeometry& geom, std::uint64_t seed, double amplitude,
                          int passes);

/// constant: c. single_mode_y: c·(1 + ε sin 2πy). single_mode_x: c·(1 + ε sin 2πx).
/// random_smooth: c·random_smooth(seed, amplitude, passes).
ScalarField make_initial(const BaseGeometry& geom, const InitialData& data);

}  // namespace cryf
