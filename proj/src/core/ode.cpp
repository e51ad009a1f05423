#include "conform/ode.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "conform/errors.hpp"

namespace conform {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

std::vector<OdeNode> integrate_dopri(const OdeRhs& rhs, double t0, std::vector<double> y0, double t_end,
                                     const OdeOptions& opt) {
  const std::size_t n = y0.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ys(n), yn(n);
  rhs(t0, y0, k1);
  std::vector<OdeNode> nodes{{t0, y0, k1}};
  if (t0 == t_end) return nodes;

  const double dir = t_end > t0 ? 1.0 : -1.0;
  const double span = std::abs(t_end - t0);
  const double hmax = std::min(opt.max_step > 0 ? opt.max_step : span, span);
  double h = std::min(opt.initial_step > 0 ? opt.initial_step : hmax, hmax);
  const double hmin = 1e-14 * std::max(1.0, std::max(std::abs(t0), std::abs(t_end)));
  double t = t0;
  std::vector<double> y = std::move(y0);

  for (long step = 0; dir * (t_end - t) > 0; ++step) {
    if (step > opt.max_steps) throw IntegratorError("integrator exceeded the step budget");
    bool last = false;
    if (h >= std::abs(t_end - t)) {
      h = std::abs(t_end - t);
      last = true;
    }
    const double hs = dir * h;
    auto stage = [&](std::vector<double>& out, double tc, auto combine) {
      for (std::size_t i = 0; i < n; ++i) ys[i] = y[i] + hs * combine(i);
      rhs(tc, ys, out);
    };
    stage(k2, t + c2 * hs, [&](std::size_t i) { return a21 * k1[i]; });
    stage(k3, t + c3 * hs, [&](std::size_t i) { return a31 * k1[i] + a32 * k2[i]; });
    stage(k4, t + c4 * hs, [&](std::size_t i) { return a41 * k1[i] + a42 * k2[i] + a43 * k3[i]; });
    stage(k5, t + c5 * hs,
          [&](std::size_t i) { return a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]; });
    stage(k6, t + hs, [&](std::size_t i) {
      return a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i];
    });
    for (std::size_t i = 0; i < n; ++i)
      yn[i] = y[i] + hs * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    const double tn = last ? t_end : t + hs;
    rhs(tn, yn, k7);

    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ei =
          hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc = opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(yn[i]));
      err += (ei / sc) * (ei / sc);
    }
    err = std::sqrt(err / static_cast<double>(n));
    if (!std::isfinite(err) || !all_finite(yn)) err = 1e10;

    if (err <= 1.0) {
      t = tn;
      y = yn;
      k1 = k7;
      nodes.push_back({t, y, k1});
      const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      h = std::min(h * fac, hmax);
    } else {
      h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
      if (h < hmin) {
        std::ostringstream msg;
        msg << "integrator step underflow at t = " << t;
        throw IntegratorError(msg.str());
      }
    }
  }
  return nodes;
}

}  // namespace conform
