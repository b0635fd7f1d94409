#pragma once

// Discretized Heisenberg nilmanifold Γ\H¹.
//
// H¹ carries the product (a,b,c)·(x,y,z) = (a+x, b+y, c+z+a·y); the integer lattice Γ acts on
// the left, so grid functions obey
//   f(x+1, y, z+y) = f(x, y, z),  f(x, y+1, z) = f(x, y, z),  f(x, y, z+1) = f(x, y, z).
// Left-invariant frame: X = ∂x, Y = ∂y + x∂z, Z = ∂z, with [X,Y] = Z. The sub-Laplacian is X²+Y²
// and the volume element is dx dy dz; the fundamental cell [0,1)³ has unit volume.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "cryf/field.hpp"

namespace cryf {

struct GridSpec {
  int nx = 0;
  int ny = 0;
  int nz = 0;

  /// Throws ConfigError unless every N >= 4 and N_y divides N_z.
  void validate() const;

  std::size_t points() const noexcept {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) * static_cast<std::size_t>(nz);
  }
  double hx() const noexcept { return 1.0 / nx; }
  double hy() const noexcept { return 1.0 / ny; }
  double hz() const noexcept { return 1.0 / nz; }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct Index3 {
  int i = 0;
  int j = 0;
  int k = 0;
  friend bool operator==(const Index3&, const Index3&) = default;
};

enum class Frame { X, Y, Z };
enum class Scheme { Forward, Centered };

/// Maps any signed lattice index to its in-range representative: wrap k, wrap j, then wrap i
/// with a k shift of -j·N_z/N_y per unit wrap in the positive direction.
Index3 canonical_index(const GridSpec& grid, int i, int j, int k);

class BaseGeometry {
 public:
  /// Builds the nilmanifold geometry. Throws ConfigError on invalid grids.
  explicit BaseGeometry(GridSpec grid);

  const GridSpec& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return grid_.points(); }
  /// CR dimension parameter; this geometry is three-dimensional so n = 1.
  int n() const noexcept { return 1; }
  /// Background Webster curvature R_θ (identically zero, the structure is Webster-flat).
  const ScalarField& base_curvature() const noexcept { return base_curvature_; }
  /// Quadrature weight w₀ = h_x·h_y·h_z.
  double cell_weight() const noexcept { return cell_weight_; }

  std::size_t flat(int i, int j, int k) const noexcept {
    return (static_cast<std::size_t>(i) * grid_.ny + static_cast<std::size_t>(j)) * grid_.nz +
           static_cast<std::size_t>(k);
  }
  std::size_t flat(const Index3& idx) const noexcept { return flat(idx.i, idx.j, idx.k); }
  Index3 unflat(std::size_t p) const noexcept;

  /// Flat index of the canonical neighbour one cell away along a coordinate axis.
  /// `axis` is 0 (x), 1 (y) or 2 (z); `dir` is +1 or -1.
  std::size_t neighbor(std::size_t p, int axis, int dir) const noexcept {
    return neighbors_[p * 6 + static_cast<std::size_t>(axis * 2 + (dir > 0 ? 0 : 1))];
  }

  double x_of(std::size_t p) const noexcept {
    return static_cast<double>(p / (static_cast<std::size_t>(grid_.ny) * grid_.nz)) * grid_.hx();
  }

  /// Samples f(x, y, z) at the grid points of the fundamental cell.
  ScalarField sample(const std::function<double(double, double, double)>& f) const;

  ScalarField zeros() const { return ScalarField(size(), 0.0); }
  ScalarField constant(double c) const { return ScalarField(size(), c); }

 private:
  GridSpec grid_;
  double cell_weight_;
  ScalarField base_curvature_;
  std::vector<std::size_t> neighbors_;
};

/// Same as constructing BaseGeometry directly; kept as the named entry point.
BaseGeometry build_nilmanifold(const GridSpec& grid);

/// Forward (first order) or centered (second order) difference along a frame field.
/// For Y the coefficient x is taken at the evaluation point.
ScalarField frame_derivative(const BaseGeometry& geom, const ScalarField& f, Frame which,
                             Scheme scheme);

/// Exact adjoint of the forward frame difference under ⟨f,g⟩ = w₀ Σ f·g. Only X and Y.
ScalarField forward_difference_adjoint(const BaseGeometry& geom, const ScalarField& g, Frame which);

/// −Σ_{V∈{X,Y}} D_V*(w̄ · D_V f), with w averaged onto the difference edge.
/// Throws ConfigError if w has a non-positive entry.
ScalarField weighted_div_form(const BaseGeometry& geom, const ScalarField& w, const ScalarField& f);

/// Base sub-Laplacian Δ_θ = −(D_X*D_X + D_Y*D_Y); weighted_div_form with unit weight.
ScalarField sub_laplacian_base(const BaseGeometry& geom, const ScalarField& f);

/// w₀ Σ f.
double integrate_base(const BaseGeometry& geom, const ScalarField& f);

/// w₀ Σ f·g.
double inner_product(const BaseGeometry& geom, const ScalarField& f, const ScalarField& g);

/// result(i,j,k) = f(i, j, k+m): pullback by a central (Reeb) translation of m grid cells.
ScalarField pullback_z_shift(const BaseGeometry& geom, const ScalarField& f, long long m);

/// XYf − YXf − Zf with centered differences; vanishes to discretization error.
ScalarField frame_commutator_check(const BaseGeometry& geom, const ScalarField& f);

}  // namespace cryf
