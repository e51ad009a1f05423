#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace conform {

struct QuadratureConfig {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_depth = 40;

  void validate() const;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
};

using Integrand = std::function<double(double)>;

// Globally adaptive 21-point Gauss-Kronrod on [a, b]; b < a integrates backwards.
// Throws QuadratureError when an interval must be bisected past max_depth.
QuadratureResult integrate(const Integrand& f, double a, double b,
                           const QuadratureConfig& cfg = {});

// Same, with the interval split at interior breakpoints (kinks, cutoffs).
QuadratureResult integrate(const Integrand& f, double a, double b,
                           std::span<const double> breakpoints,
                           const QuadratureConfig& cfg = {});

double integral(const Integrand& f, double a, double b, const QuadratureConfig& cfg = {});

// Integral of f from origin to each grid node; panels follow the grid.
std::vector<double> cumulative_integral(const Integrand& f, std::span<const double> grid, double origin,
                                        const QuadratureConfig& cfg = {});

// F(t) = integral of f from origin to t, tabulated on a uniform grid over
// [lo, hi] so each evaluation only integrates from the nearest node.
class Antiderivative {
 public:
  Antiderivative(Integrand f, double lo, double hi, double origin, std::size_t panels = 64,
                 const QuadratureConfig& cfg = {});

  double operator()(double t) const;
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

 private:
  Integrand f_;
  double lo_, hi_, step_;
  std::vector<double> cumulative_;  // integral from lo_ to node k
  double offset_;                   // integral from lo_ to origin
  QuadratureConfig cfg_;
};

}  // namespace conform
