#pragma once

#include <stdexcept>
#include <string>

namespace cryf {

/// Invalid grid, flow, or run configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A conformal factor reached (or started at) a non-positive value or the u floor.
class PositivityError : public std::runtime_error {
 public:
  PositivityError(const std::string& what, double min_u)
      : std::runtime_error(what), min_u_(min_u) {}
  double min_u() const noexcept { return min_u_; }

 private:
  double min_u_;
};

/// Adaptive step control would need dt below dt_min.
class StepUnderflowError : public std::runtime_error {
 public:
  StepUnderflowError(const std::string& what, double dt)
      : std::runtime_error(what), dt_(dt) {}
  double dt() const noexcept { return dt_; }

 private:
  double dt_;
};

}  // namespace cryf
