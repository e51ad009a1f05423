#pragma once

#include <functional>
#include <vector>

namespace conform {

struct OdeOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-11;
  double initial_step = 0.01;
  double max_step = 0.01;
  long max_steps = 2000000;
};

struct OdeNode {
  double t;
  std::vector<double> y;
  std::vector<double> dy;  // right-hand side at (t, y), for Hermite dense output
};

using OdeRhs = std::function<void(double t, const std::vector<double>& y, std::vector<double>& dy)>;

// Dormand-Prince 5(4) from t0 to t_end (either direction). Returns every
// accepted node including both endpoints. Throws IntegratorError on step
// underflow or non-finite state.
std::vector<OdeNode> integrate_dopri(const OdeRhs& rhs, double t0, std::vector<double> y0, double t_end,
                                     const OdeOptions& opt);

}  // namespace conform
