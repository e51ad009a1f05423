#include "conform/confcalc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "conform/errors.hpp"

namespace conform {

namespace {

void require_segment(const KappaPair& pair, double a, double b) {
  pair.require_in_domain(a, "interval endpoint");
  pair.require_in_domain(b, "interval endpoint");
}

double finite_or_throw(double v, const char* what, double t) {
  if (!std::isfinite(v)) {
    std::ostringstream msg;
    msg << what << " is not finite at t = " << t;
    throw NumericsError(msg.str());
  }
  return v;
}

}  // namespace

double dalpha(const KappaPair& pair, const ScalarField& f, double t) {
  pair.require_in_domain(t);
  const double v = pair.k1(t) * f(t) + pair.k0(t) * f.derivative_at(t);
  return finite_or_throw(v, "D^a f", t);
}

ScalarField dalpha_field(const KappaPair& pair, const ScalarField& f) {
  return (pair.kappa1() * f + pair.kappa0() * f.derivative()).relabeled("Da[" + f.label() + "]");
}

double dalpha2(const KappaPair& pair, const ScalarField& f, double t) {
  return dalpha(pair, dalpha_field(pair, f), t);
}

double log_exp_p(const ExpArgs& args, double t, double s, const QuadratureConfig& quad) {
  const KappaPair& k = args.pair;
  require_segment(k, t, s);
  if (t == s) return 0.0;
  const ScalarField& p = args.p;
  return integral([&](double u) { return (p(u) - k.k1(u)) / k.k0(u); }, s, t, quad);
}

double exp_p(const ExpArgs& args, double t, double s, const QuadratureConfig& quad) {
  return std::exp(log_exp_p(args, t, s, quad));
}

double log_e0(const KappaPair& pair, double t, double s, const QuadratureConfig& quad) {
  require_segment(pair, t, s);
  if (t == s) return 0.0;
  if (const auto& r = pair.ratio_primitive()) return -(r(t) - r(s));
  return -integral([&](double u) { return pair.k1(u) / pair.k0(u); }, s, t, quad);
}

double e0(const KappaPair& pair, double t, double s, const QuadratureConfig& quad) {
  return std::exp(log_e0(pair, t, s, quad));
}

double h1(const KappaPair& pair, double t, double a, const QuadratureConfig& quad) {
  require_segment(pair, t, a);
  if (t == a) return 0.0;
  if (const auto& r = pair.inverse_primitive()) return r(t) - r(a);
  return integral([&](double u) { return 1.0 / pair.k0(u); }, a, t, quad);
}

double alpha_integral(const KappaPair& pair, const ScalarField& f, double a, double b, Weight weight,
                      const QuadratureConfig& quad) {
  require_segment(pair, a, b);
  switch (weight) {
    case Weight::none:
      return integral([&](double t) { return f(t) / pair.k0(t); }, a, b, quad);
    case Weight::e0_right:
      return integral([&](double t) { return f(t) * e0(pair, b, t, quad) / pair.k0(t); }, a, b, quad);
    case Weight::e0sq_right:
      return integral(
          [&](double t) { return f(t) * std::exp(2 * log_e0(pair, b, t, quad)) / pair.k0(t); }, a, b,
          quad);
  }
  return 0.0;
}

double special(const KappaPair& pair, Special kind, double omega, double t, double t0,
               const QuadratureConfig& quad) {
  if (!(omega > 0.0)) throw InvalidArgument("special: omega must be positive");
  const double le0 = log_e0(pair, t, t0, quad);
  const double arg = omega * h1(pair, t, t0, quad);
  switch (kind) {
    case Special::cos_a: return std::exp(le0) * std::cos(arg);
    case Special::sin_a: return std::exp(le0) * std::sin(arg);
    case Special::cosh_a: return 0.5 * (std::exp(le0 + arg) + std::exp(le0 - arg));
    case Special::sinh_a: return 0.5 * (std::exp(le0 + arg) - std::exp(le0 - arg));
  }
  return 0.0;
}

ScalarField e0_field(const KappaPair& pair, double s, const QuadratureConfig& quad) {
  return ScalarField::lazy([pair, s, quad](double t) { return e0(pair, t, s, quad); },
                           [pair, s, quad] {
                             return -(pair.kappa1() / pair.kappa0()) * e0_field(pair, s, quad);
                           },
                           "e0(t,s)");
}

ScalarField e0_field_from(const KappaPair& pair, double b, const QuadratureConfig& quad) {
  return ScalarField::lazy([pair, b, quad](double t) { return e0(pair, b, t, quad); },
                           [pair, b, quad] {
                             return (pair.kappa1() / pair.kappa0()) * e0_field_from(pair, b, quad);
                           },
                           "e0(b,t)");
}

ScalarField exp_field(const ExpArgs& args, double s, const QuadratureConfig& quad) {
  return ScalarField::lazy([args, s, quad](double t) { return exp_p(args, t, s, quad); },
                           [args, s, quad] {
                             const KappaPair& k = args.pair;
                             return ((args.p - k.kappa1()) / k.kappa0()) * exp_field(args, s, quad);
                           },
                           "e_p(t,s)");
}

ScalarField h1_field(const KappaPair& pair, double a, const QuadratureConfig& quad) {
  return ScalarField::lazy([pair, a, quad](double t) { return h1(pair, t, a, quad); },
                           [pair] { return 1.0 / pair.kappa0(); }, "h1(t,a)");
}

ScalarField special_field(const KappaPair& pair, Special kind, double omega, double t0,
                          const QuadratureConfig& quad) {
  if (!(omega > 0.0)) throw InvalidArgument("special: omega must be positive");
  const ScalarField e = e0_field(pair, t0, quad);
  const ScalarField arg = omega * h1_field(pair, t0, quad);
  switch (kind) {
    case Special::cos_a: return e * cos(arg);
    case Special::sin_a: return e * sin(arg);
    case Special::cosh_a: return e * cosh(arg);
    case Special::sinh_a: return e * sinh(arg);
  }
  return {};
}

ScalarField geodesic(const KappaPair& pair, const ScalarField& f, double a, std::optional<double> b,
                     Geodesic kind, const QuadratureConfig& quad) {
  const double fa = f(a);
  const ScalarField ea = e0_field(pair, a, quad);
  const ScalarField ha = h1_field(pair, a, quad);
  if (kind == Geodesic::tangent) return fa * ea + dalpha(pair, f, a) * (ha * ea);
  if (!b) throw InvalidArgument("geodesic: secant needs the right endpoint b");
  const double fb = f(*b);
  const double span = h1(pair, *b, a, quad);
  if (span == 0.0) throw InvalidArgument("geodesic: secant needs a != b");
  return fa * ea + ha * (fb * e0_field(pair, *b, quad) - fa * ea) / span;
}

double inner_product(const KappaPair& pair, const ScalarField& f, const ScalarField& g, double a,
                     double b, const QuadratureConfig& quad) {
  require_segment(pair, a, b);
  return integral(
      [&](double t) { return f(t) * g(t) * std::exp(2 * log_e0(pair, b, t, quad)) / pair.k0(t); }, a,
      b, quad);
}

CriticalReport find_alpha_critical(const KappaPair& pair, const ScalarField& f, double lo, double hi,
                                   int grid_n) {
  if (grid_n < 2) throw InvalidArgument("find_alpha_critical: grid_n must be >= 2");
  if (!(hi > lo)) throw InvalidArgument("find_alpha_critical: empty interval");
  require_segment(pair, lo, hi);

  const ScalarField g = dalpha_field(pair, f);
  std::vector<double> ts(grid_n), gs(grid_n);
  double scale = 0.0, gmax = 0.0;
  for (int i = 0; i < grid_n; ++i) {
    const double t = i + 1 == grid_n ? hi : lo + (hi - lo) * i / (grid_n - 1);
    ts[i] = t;
    gs[i] = g(t);
    scale = std::max(scale, std::abs(pair.k1(t) * f(t)) + std::abs(pair.k0(t) * f.derivative_at(t)));
    gmax = std::max(gmax, std::abs(gs[i]));
  }

  CriticalReport report;
  if (gmax <= 1e-9 * scale || gmax == 0.0) {
    report.degenerate = true;
    return report;
  }

  auto classify = [&](double t) {
    const double d2 = dalpha2(pair, f, t);
    const double tol = 1e-8 * std::max(scale, 1.0);
    if (d2 < -tol) return CriticalKind::alpha_max;
    if (d2 > tol) return CriticalKind::alpha_min;
    return CriticalKind::saddle;
  };

  for (int i = 0; i < grid_n; ++i) {
    if (gs[i] == 0.0) {
      report.points.push_back({ts[i], classify(ts[i])});
      continue;
    }
    if (i + 1 < grid_n && gs[i + 1] != 0.0 && (gs[i] < 0) != (gs[i + 1] < 0)) {
      double a = ts[i], b = ts[i + 1], ga = gs[i];
      while (b - a > 1e-10) {
        const double m = 0.5 * (a + b);
        const double gm = g(m);
        if (gm == 0.0) {
          a = b = m;
          break;
        }
        if ((gm < 0) == (ga < 0)) {
          a = m;
          ga = gm;
        } else {
          b = m;
        }
      }
      const double root = 0.5 * (a + b);
      report.points.push_back({root, classify(root)});
    }
    // A touching zero shows up as a small local minimum of |D^a f| with no sign change.
    if (i > 0 && i + 1 < grid_n) {
      const double l = std::abs(gs[i - 1]), c = std::abs(gs[i]), r = std::abs(gs[i + 1]);
      const bool same_sign = (gs[i - 1] < 0) == (gs[i] < 0) && (gs[i] < 0) == (gs[i + 1] < 0);
      if (same_sign && c < l && c < r && c < 1e-3 * gmax) report.unresolved.emplace_back(ts[i - 1], ts[i + 1]);
    }
  }
  return report;
}

}  // namespace conform
