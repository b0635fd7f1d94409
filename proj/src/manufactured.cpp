#include "cryf/manufactured.hpp"

#include <cmath>
#include <numbers>

namespace cryf {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kThetaTerms = 6;
}  // namespace

ManufacturedCase theta_case(int m, double width) {
  const double w2 = width * width;
  auto g = [w2](double s) { return std::exp(-(s - 0.5) * (s - 0.5) / (2.0 * w2)); };
  auto g2 = [w2, g](double s) {
    const double d = s - 0.5;
    return (d * d / (w2 * w2) - 1.0 / w2) * g(s);
  };
  const double freq = kTwoPi * m;
  Function3 f = [=](double x, double y, double z) {
    double acc = 0.0;
    for (int l = -kThetaTerms; l <= kThetaTerms; ++l) acc += g(x + l) * std::cos(freq * (z + l * y));
    return acc;
  };
  Function3 lap = [=](double x, double y, double z) {
    double acc = 0.0;
    for (int l = -kThetaTerms; l <= kThetaTerms; ++l) {
      const double s = x + l;
      acc += (g2(s) - freq * freq * s * s * g(s)) * std::cos(freq * (z + l * y));
    }
    return acc;
  };
  return {"theta_m" + std::to_string(m), f, lap, true};
}

std::vector<ManufacturedCase> manufactured_cases() {
  const double a = kTwoPi;
  std::vector<ManufacturedCase> cases;
  cases.push_back({"sin_2pi_x", [=](double x, double, double) { return std::sin(a * x); },
                   [=](double x, double, double) { return -a * a * std::sin(a * x); }, false});
  cases.push_back({"sin_2pi_y", [=](double, double y, double) { return std::sin(a * y); },
                   [=](double, double y, double) { return -a * a * std::sin(a * y); }, false});
  cases.push_back({"cos_2pi_x_cos_2pi_y",
                   [=](double x, double y, double) { return std::cos(a * x) * std::cos(a * y); },
                   [=](double x, double y, double) {
                     return -2.0 * a * a * std::cos(a * x) * std::cos(a * y);
                   },
                   false});
  cases.push_back(theta_case());
  return cases;
}

WeightedCase weighted_case() {
  const double a = kTwoPi;
  WeightedCase c;
  c.w = [=](double x, double y, double) { return 1.0 + 0.5 * std::sin(a * x) * std::cos(a * y); };
  c.f = [=](double x, double y, double) { return std::cos(a * x) * std::sin(a * y); };
  c.div_form = [=](double x, double y, double) {
    const double w = 1.0 + 0.5 * std::sin(a * x) * std::cos(a * y);
    const double wx = 0.5 * a * std::cos(a * x) * std::cos(a * y);
    const double wy = -0.5 * a * std::sin(a * x) * std::sin(a * y);
    const double fx = -a * std::sin(a * x) * std::sin(a * y);
    const double fy = a * std::cos(a * x) * std::cos(a * y);
    const double fxx = -a * a * std::cos(a * x) * std::sin(a * y);
    const double fyy = -a * a * std::cos(a * x) * std::sin(a * y);
    return wx * fx + w * fxx + wy * fy + w * fyy;
  };
  return c;
}

}  // namespace cryf
