#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace cryf {

/// One real value per grid point, row-major with k fastest.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(std::size_t size, double fill = 0.0) : values_(size, fill) {}
  explicit ScalarField(std::vector<double> values) : values_(std::move(values)) {}

  std::size_t size() const noexcept { return values_.size(); }

  double& operator[](std::size_t p) noexcept { return values_[p]; }
  double operator[](std::size_t p) const noexcept { return values_[p]; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  const std::vector<double>& data() const noexcept { return values_; }

  auto begin() noexcept { return values_.begin(); }
  auto end() noexcept { return values_.end(); }
  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

  double min() const { return *std::min_element(values_.begin(), values_.end()); }
  double max() const { return *std::max_element(values_.begin(), values_.end()); }
  double max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }
  bool all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
  }

  friend bool operator==(const ScalarField&, const ScalarField&) = default;

 private:
  std::vector<double> values_;
};

}  // namespace cryf
