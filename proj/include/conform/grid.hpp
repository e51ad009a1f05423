#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "conform/field.hpp"

namespace conform {

// n >= 2 uniformly spaced points, endpoints exact.
inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i)
    g[i] = i + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return g;
}

// max |f| over n uniform points of [lo, hi].
inline double sup_abs(const ScalarField& f, double lo, double hi, std::size_t n = 201) {
  double m = 0.0;
  for (double t : linspace(lo, hi, n)) m = std::max(m, std::abs(f(t)));
  return m;
}

}  // namespace conform
