#pragma once

#include <memory>
#include <span>
#include <vector>

#include "conform/field.hpp"

namespace conform {

// Sampled solution: grid, x, D^a x. Both channels are cubic Hermite
// interpolants; slopes are supplied by the producer (e.g. from the ODE
// right-hand side) or, when absent, taken from a not-a-knot cubic spline.
// Interpolation reproduces stored values at nodes exactly.
class Trajectory {
 public:
  Trajectory(std::vector<double> grid, std::vector<double> x, std::vector<double> dax);
  Trajectory(std::vector<double> grid, std::vector<double> x, std::vector<double> dax,
             std::vector<double> x_slope, std::vector<double> dax_slope);

  std::size_t size() const noexcept;
  double lo() const noexcept;
  double hi() const noexcept;
  std::span<const double> grid() const noexcept;
  std::span<const double> x() const noexcept;
  std::span<const double> dax() const noexcept;

  double x_at(double t) const;
  double dax_at(double t) const;
  double x_slope_at(double t) const;    // classical derivative of the x interpolant
  double dax_slope_at(double t) const;  // classical derivative of the D^a x interpolant

  bool spans(double t) const noexcept;  // within the grid up to rounding
  void require_span(double t) const;    // throws DomainError

  // Channels as fields; their derivatives come from the interpolant up to
  // second order, numeric beyond.
  ScalarField x_field() const;
  ScalarField dax_field() const;

  double max_abs_x() const;

  struct Data;  // opaque

 private:
  std::shared_ptr<const Data> d_;
};

// Slopes of the not-a-knot cubic spline through (grid, values).
std::vector<double> spline_slopes(std::span<const double> grid, std::span<const double> values);

}  // namespace conform
