#include "cryf/geometry.hpp"

#include <cmath>
#include <sstream>

#include "cryf/errors.hpp"
#include "cryf/numeric.hpp"
#include "cryf/parallel.hpp"

namespace cryf {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t floor_mod(std::int64_t a, std::int64_t b) { return a - floor_div(a, b) * b; }

void require_shape(const BaseGeometry& geom, const ScalarField& f, const char* what) {
  if (f.size() != geom.size()) {
    std::ostringstream msg;
    msg << what << ": field has " << f.size() << " values, grid has " << geom.size();
    throw ConfigError(msg.str());
  }
}

// Shared kernel for weighted_div_form / sub_laplacian_base. A null weight means w ≡ 1.
ScalarField div_form_kernel(const BaseGeometry& geom, const ScalarField* w, const ScalarField& f) {
  const std::size_t size = geom.size();
  const double hx = geom.grid().hx();
  const double hy = geom.grid().hy();
  const double hz = geom.grid().hz();

  ScalarField flux_x(size);
  ScalarField flux_y(size);
  parallel_for(size, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t p = lo; p < hi; ++p) {
      const std::size_t px = geom.neighbor(p, 0, +1);
      const std::size_t py = geom.neighbor(p, 1, +1);
      const std::size_t pz = geom.neighbor(p, 2, +1);
      double dx = (f[px] - f[p]) / hx;
      double dy = (f[py] - f[p]) / hy + geom.x_of(p) * ((f[pz] - f[p]) / hz);
      if (w != nullptr) {
        dx *= 0.5 * ((*w)[p] + (*w)[px]);
        dy *= 0.5 * ((*w)[p] + (*w)[py]);
      }
      flux_x[p] = dx;
      flux_y[p] = dy;
    }
  });

  ScalarField out(size);
  parallel_for(size, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t p = lo; p < hi; ++p) {
      const std::size_t mx = geom.neighbor(p, 0, -1);
      const std::size_t my = geom.neighbor(p, 1, -1);
      const std::size_t mz = geom.neighbor(p, 2, -1);
      out[p] = (flux_x[p] - flux_x[mx]) / hx + (flux_y[p] - flux_y[my]) / hy +
               geom.x_of(p) * ((flux_y[p] - flux_y[mz]) / hz);
    }
  });
  return out;
}

}  // namespace

void GridSpec::validate() const {
  if (nx < 4 || ny < 4 || nz < 4) {
    std::ostringstream msg;
    msg << "grid (" << nx << "," << ny << "," << nz << "): every N must be >= 4";
    throw ConfigError(msg.str());
  }
  if (nz % ny != 0) {
    std::ostringstream msg;
    msg << "grid (" << nx << "," << ny << "," << nz << "): N_y = " << ny
        << " must divide N_z = " << nz << " so the twisted x-wrap lands on grid points";
    throw ConfigError(msg.str());
  }
}

Index3 canonical_index(const GridSpec& grid, int i, int j, int k) {
  const std::int64_t nx = grid.nx;
  const std::int64_t ny = grid.ny;
  const std::int64_t nz = grid.nz;
  std::int64_t kk = floor_mod(k, nz);
  const std::int64_t jj = floor_mod(j, ny);
  const std::int64_t wraps = floor_div(i, nx);
  const std::int64_t ii = i - wraps * nx;
  // (x + q, y, z + q·y) ~ (x, y, z); y = j/N_y is j·(N_z/N_y) cells of z.
  kk = floor_mod(kk - floor_mod(wraps * jj, nz) * (nz / ny), nz);
  return {static_cast<int>(ii), static_cast<int>(jj), static_cast<int>(kk)};
}

BaseGeometry::BaseGeometry(GridSpec grid) : grid_(grid) {
  grid_.validate();
  cell_weight_ = grid_.hx() * grid_.hy() * grid_.hz();
  base_curvature_ = ScalarField(grid_.points(), 0.0);
  neighbors_.resize(grid_.points() * 6);
  for (int i = 0; i < grid_.nx; ++i) {
    for (int j = 0; j < grid_.ny; ++j) {
      for (int k = 0; k < grid_.nz; ++k) {
        const std::size_t p = flat(i, j, k);
        const std::array<Index3, 6> nb = {
            canonical_index(grid_, i + 1, j, k), canonical_index(grid_, i - 1, j, k),
            canonical_index(grid_, i, j + 1, k), canonical_index(grid_, i, j - 1, k),
            canonical_index(grid_, i, j, k + 1), canonical_index(grid_, i, j, k - 1)};
        for (std::size_t s = 0; s < nb.size(); ++s) neighbors_[p * 6 + s] = flat(nb[s]);
      }
    }
  }
}

Index3 BaseGeometry::unflat(std::size_t p) const noexcept {
  const std::size_t k = p % grid_.nz;
  const std::size_t rest = p / grid_.nz;
  return {static_cast<int>(rest / grid_.ny), static_cast<int>(rest % grid_.ny), static_cast<int>(k)};
}

ScalarField BaseGeometry::sample(const std::function<double(double, double, double)>& f) const {
  ScalarField out(size());
  for (int i = 0; i < grid_.nx; ++i) {
    const double x = i * grid_.hx();
    for (int j = 0; j < grid_.ny; ++j) {
      const double y = j * grid_.hy();
      for (int k = 0; k < grid_.nz; ++k) out[flat(i, j, k)] = f(x, y, k * grid_.hz());
    }
  }
  return out;
}

BaseGeometry build_nilmanifold(const GridSpec& grid) { return BaseGeometry(grid); }

ScalarField frame_derivative(const BaseGeometry& geom, const ScalarField& f, Frame which,
                             Scheme scheme) {
  require_shape(geom, f, "frame_derivative");
  const GridSpec& g = geom.grid();
  ScalarField out(geom.size());
  const bool centered = scheme == Scheme::Centered;
  // Difference along one axis: forward (f[+] - f)/h or centered (f[+] - f[-])/(2h).
  auto axis_diff = [&](std::size_t p, int axis, double h) {
    const std::size_t plus = geom.neighbor(p, axis, +1);
    if (centered) return (f[plus] - f[geom.neighbor(p, axis, -1)]) / (2.0 * h);
    return (f[plus] - f[p]) / h;
  };
  parallel_for(geom.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t p = lo; p < hi; ++p) {
      switch (which) {
        case Frame::X:
          out[p] = axis_diff(p, 0, g.hx());
          break;
        case Frame::Y:
          out[p] = axis_diff(p, 1, g.hy()) + geom.x_of(p) * axis_diff(p, 2, g.hz());
          break;
        case Frame::Z:
          out[p] = axis_diff(p, 2, g.hz());
          break;
      }
    }
  });
  return out;
}

ScalarField forward_difference_adjoint(const BaseGeometry& geom, const ScalarField& g, Frame which) {
  require_shape(geom, g, "forward_difference_adjoint");
  const GridSpec& grid = geom.grid();
  ScalarField out(geom.size());
  auto back = [&](std::size_t p, int axis, double h) {
    return (g[geom.neighbor(p, axis, -1)] - g[p]) / h;
  };
  parallel_for(geom.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t p = lo; p < hi; ++p) {
      switch (which) {
        case Frame::X:
          out[p] = back(p, 0, grid.hx());
          break;
        case Frame::Y:
          out[p] = back(p, 1, grid.hy()) + geom.x_of(p) * back(p, 2, grid.hz());
          break;
        case Frame::Z:
          out[p] = back(p, 2, grid.hz());
          break;
      }
    }
  });
  return out;
}

ScalarField weighted_div_form(const BaseGeometry& geom, const ScalarField& w, const ScalarField& f) {
  require_shape(geom, w, "weighted_div_form weight");
  require_shape(geom, f, "weighted_div_form");
  for (std::size_t p = 0; p < w.size(); ++p) {
    if (!(w[p] > 0.0)) {
      std::ostringstream msg;
      msg << "weighted_div_form: weight must be positive, got " << w[p] << " at point " << p;
      throw ConfigError(msg.str());
    }
  }
  return div_form_kernel(geom, &w, f);
}

ScalarField sub_laplacian_base(const BaseGeometry& geom, const ScalarField& f) {
  require_shape(geom, f, "sub_laplacian_base");
  return div_form_kernel(geom, nullptr, f);
}

double integrate_base(const BaseGeometry& geom, const ScalarField& f) {
  require_shape(geom, f, "integrate_base");
  return geom.cell_weight() * compensated_sum(f.values());
}

double inner_product(const BaseGeometry& geom, const ScalarField& f, const ScalarField& g) {
  require_shape(geom, f, "inner_product");
  require_shape(geom, g, "inner_product");
  CompensatedSum acc;
  for (std::size_t p = 0; p < f.size(); ++p) acc.add(f[p] * g[p]);
  return geom.cell_weight() * acc.value();
}

ScalarField pullback_z_shift(const BaseGeometry& geom, const ScalarField& f, long long m) {
  require_shape(geom, f, "pullback_z_shift");
  const std::int64_t nz = geom.grid().nz;
  const std::int64_t shift = floor_mod(m, nz);
  ScalarField out(f.size());
  for (std::size_t line = 0; line < f.size(); line += static_cast<std::size_t>(nz)) {
    for (std::int64_t k = 0; k < nz; ++k) {
      out[line + static_cast<std::size_t>(k)] = f[line + static_cast<std::size_t>((k + shift) % nz)];
    }
  }
  return out;
}

ScalarField frame_commutator_check(const BaseGeometry& geom, const ScalarField& f) {
  const ScalarField xf = frame_derivative(geom, f, Frame::X, Scheme::Centered);
  const ScalarField yf = frame_derivative(geom, f, Frame::Y, Scheme::Centered);
  const ScalarField zf = frame_derivative(geom, f, Frame::Z, Scheme::Centered);
  const ScalarField xyf = frame_derivative(geom, yf, Frame::X, Scheme::Centered);
  const ScalarField yxf = frame_derivative(geom, xf, Frame::Y, Scheme::Centered);
  ScalarField out(f.size());
  for (std::size_t p = 0; p < f.size(); ++p) out[p] = xyf[p] - yxf[p] - zf[p];
  return out;
}

}  // namespace cryf
