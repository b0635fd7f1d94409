#pragma once

// Smooth functions on Γ\H¹ with closed-form sub-Laplacians, for convergence studies.

#include <functional>
#include <string>
#include <vector>

namespace cryf {

using Function3 = std::function<double(double, double, double)>;

struct ManufacturedCase {
  std::string name;
  Function3 f;
  Function3 sub_laplacian;  // (X² + Y²) f
  bool twisted;             // depends on z, so the x-wrap twist and x∂z enter
};

/// Well-defined z-dependent function of frequency m in z:
///   Σ_l g(x + l) cos(2πm(z + l·y)),  g(s) = exp(−(s − 1/2)² / (2w²)).
/// (X²+Y²) of each term is (g'' − (2πm)²(x+l)² g)·cos(·).
ManufacturedCase theta_case(int m = 1, double width = 0.2);

/// sin 2πx, sin 2πy, cos 2πx·cos 2πy, and theta_case().
std::vector<ManufacturedCase> manufactured_cases();

/// Variable-weight case for the divergence form, z-independent.
struct WeightedCase {
  Function3 w;
  Function3 f;
  Function3 div_form;  // X(w Xf) + Y(w Yf)
};
WeightedCase weighted_case();

}  // namespace cryf
