#include "conform/structure.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "conform/errors.hpp"
#include "conform/grid.hpp"
#include "conform/parallel.hpp"

namespace conform {

namespace {

double resolve_step(const SelfAdjointProblem& prob, double step) {
  return step > 0.0 ? step : default_step(prob.lo, prob.hi);
}

std::vector<double> to_vector(std::span<const double> s) { return {s.begin(), s.end()}; }

void check_grid(const std::vector<double>& g, double lo, double hi, const char* name) {
  if (g.size() < 4) throw InvalidArgument(std::string(name) + " needs at least 4 points");
  const double tol = 1e-12 * std::max(1.0, hi - lo);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] < lo - tol || g[i] > hi + tol) throw DomainError(std::string(name) + " leaves the interval");
    if (i > 0 && !(g[i] > g[i - 1])) throw InvalidArgument(std::string(name) + " must be strictly increasing");
  }
}

// Uniform grid with spacing at most step, with extra nodes inserted exactly.
std::vector<double> uniform_with(double lo, double hi, double step, std::initializer_list<double> extra) {
  const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / step)) + 1;
  std::vector<double> g = linspace(lo, hi, std::max<std::size_t>(n, 4));
  for (double e : extra)
    if (e > lo && e < hi) g.push_back(e);
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

void require_positive(const Trajectory& x, const char* what) {
  require_nonvanishing(x, what);
  if (x.x().front() < 0.0) throw DomainError(std::string(what) + " must be positive");
}

}  // namespace

Kernel::Kernel(std::vector<double> t_grid, std::vector<double> s_grid, Eval eval)
    : t_(std::move(t_grid)), s_(std::move(s_grid)), eval_(std::move(eval)) {
  values_.resize(t_.size() * s_.size());
  dax_.resize(values_.size());
  parallel_for(s_.size(), [&](std::size_t j) {
    for (std::size_t i = 0; i < t_.size(); ++i) {
      const KernelPoint kp = eval_(t_[i], s_[j]);
      values_[i * s_.size() + j] = kp.value;
      dax_[i * s_.size() + j] = kp.dax;
    }
  });
}

Kernel::Kernel(std::vector<double> t_grid, std::vector<double> s_grid, std::vector<double> values,
               std::vector<double> dax, Eval eval)
    : t_(std::move(t_grid)), s_(std::move(s_grid)), values_(std::move(values)), dax_(std::move(dax)),
      eval_(std::move(eval)) {
  if (values_.size() != t_.size() * s_.size() || dax_.size() != values_.size())
    throw InvalidArgument("kernel samples do not match the grids");
}

std::pair<std::size_t, std::array<double, 4>> column_stencil(const std::vector<double>& g, double s) {
  const std::size_t n = g.size();
  if (n < 4) throw InvalidArgument("column stencil needs at least 4 columns");
  auto it = std::upper_bound(g.begin(), g.end(), s);
  std::ptrdiff_t k = (it - g.begin()) - 1;
  const auto start = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(k - 1, 0, static_cast<std::ptrdiff_t>(n) - 4));
  std::array<double, 4> w{};
  for (std::size_t a = 0; a < 4; ++a) {
    double v = 1.0;
    for (std::size_t b = 0; b < 4; ++b)
      if (a != b) v *= (s - g[start + b]) / (g[start + a] - g[start + b]);
    w[a] = v;
  }
  return {start, w};
}

Kernel cauchy_kernel(const SelfAdjointProblem& prob, CauchyMethod method, std::vector<double> s_grid, double step) {
  prob.validate();
  step = resolve_step(prob, step);
  if (s_grid.empty()) s_grid = linspace(prob.lo, prob.hi, kDefaultKernelGrid);
  check_grid(s_grid, prob.lo, prob.hi, "cauchy_kernel s_grid");
  std::vector<double> t_grid = s_grid;

  if (method == CauchyMethod::basis_formula) {
    auto [u, v] = basis(prob, prob.lo, step);
    const ScalarField p = prob.p;
    Kernel::Eval eval = [u, v, p](double t, double s) {
      const double us = u.x_at(s), vs = v.x_at(s);
      const double pw = p(s) * (us * v.dax_at(s) - vs * u.dax_at(s));
      return KernelPoint{(us * v.x_at(t) - vs * u.x_at(t)) / pw, (us * v.dax_at(t) - vs * u.dax_at(t)) / pw};
    };
    return Kernel(std::move(t_grid), std::move(s_grid), std::move(eval));
  }

  // One homogeneous IVP per column, each over the whole interval.
  std::vector<std::optional<Trajectory>> cols(s_grid.size());
  parallel_for(s_grid.size(), [&](std::size_t j) {
    const double s = s_grid[j];
    const InitialState st{0.0, 1.0 / prob.p(s), false};
    cols[j] = solve_ivp_batch(prob, s, std::span<const InitialState>(&st, 1), step).front();
  });
  auto columns = std::make_shared<std::vector<Trajectory>>();
  for (auto& c : cols) columns->push_back(std::move(*c));
  std::vector<double> values(t_grid.size() * s_grid.size()), dax(values.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i)
    for (std::size_t j = 0; j < s_grid.size(); ++j) {
      values[i * s_grid.size() + j] = (*columns)[j].x_at(t_grid[i]);
      dax[i * s_grid.size() + j] = (*columns)[j].dax_at(t_grid[i]);
    }
  Kernel::Eval eval = [columns, s_grid](double t, double s) {
    auto [start, w] = column_stencil(s_grid, s);
    KernelPoint kp{0.0, 0.0};
    for (std::size_t a = 0; a < 4; ++a) {
      if (w[a] == 0.0) continue;
      kp.value += w[a] * (*columns)[start + a].x_at(t);
      kp.dax += w[a] * (*columns)[start + a].dax_at(t);
    }
    return kp;
  };
  return Kernel(std::move(t_grid), std::move(s_grid), std::move(values), std::move(dax), std::move(eval));
}

// With u, v the basis at a (p W = 1 at a) the Cauchy function is
// (u(s) v(t) - v(s) u(t)) / (p W)(s), so x = v I_u - u I_v with running
// integrals I_w(t) = int_a^t w h / (p W) d_a s.
Trajectory variation_of_constants(const SelfAdjointProblem& prob, double a, double step) {
  prob.validate();
  if (a < prob.lo || a > prob.hi) throw DomainError("variation_of_constants: a outside the interval");
  step = resolve_step(prob, step);
  auto [u, v] = basis(prob, a, step);
  const KappaPair& k = prob.pair;
  const auto grid = to_vector(u.grid());
  const std::size_t n = grid.size();
  auto weight = [&](double s) {
    const double pw = prob.p(s) * (u.x_at(s) * v.dax_at(s) - v.x_at(s) * u.dax_at(s));
    return prob.h(s) / (pw * k.k0(s));
  };
  std::vector<double> iu(n, 0.0), iv(n, 0.0);
  if (!prob.h.is_zero()) {
    iu = cumulative_integral([&](double s) { return u.x_at(s) * weight(s); }, grid, a);
    iv = cumulative_integral([&](double s) { return v.x_at(s) * weight(s); }, grid, a);
  }
  std::vector<double> x(n), dax(n), xs(n), ds(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = grid[i];
    const double uu = u.x()[i], vv = v.x()[i], du = u.dax()[i], dv = v.dax()[i];
    x[i] = vv * iu[i] - uu * iv[i];
    dax[i] = dv * iu[i] - du * iv[i];
    xs[i] = v.x_slope_at(t) * iu[i] - u.x_slope_at(t) * iv[i];
    ds[i] = v.dax_slope_at(t) * iu[i] - u.dax_slope_at(t) * iv[i] + prob.h(t) / (prob.p(t) * k.k0(t));
  }
  return Trajectory(grid, std::move(x), std::move(dax), std::move(xs), std::move(ds));
}

void require_nonvanishing(const Trajectory& x, const char* what) {
  const auto xs = x.x();
  const double scale = x.max_abs_x();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const bool small = !(std::abs(xs[i]) > 1e-8 * scale);
    const bool flips = i > 0 && (xs[i] > 0) != (xs[i - 1] > 0);
    if (small || flips) {
      std::ostringstream msg;
      msg << what << " vanishes near t = " << x.grid()[i];
      throw DomainError(msg.str());
    }
  }
}

// D^a y = Q D^a x + e0^2(t, t0) / (p x) with Q' = e0^2(t, t0) / (p x^2 kappa0).
Trajectory reduce_order(const SelfAdjointProblem& prob, const Trajectory& x, double t0) {
  require_nonvanishing(x, "reduce_order: x");
  x.require_span(t0);
  const KappaPair& k = prob.pair;
  const auto grid = to_vector(x.grid());
  const std::size_t n = grid.size();
  auto f = [&](double s) {
    const double e = e0(k, s, t0), xv = x.x_at(s);
    return e * e / (prob.p(s) * xv * xv * k.k0(s));
  };
  const auto Q = cumulative_integral(f, grid, t0);
  std::vector<double> y(n), dy(n), ys(n), dys(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = grid[i];
    const double xv = x.x()[i], dx = x.dax()[i], xp = x.x_slope_at(t);
    const double e = e0(k, t, t0), pv = prob.p(t);
    const double g = e * e / (pv * xv);
    y[i] = xv * Q[i];
    dy[i] = Q[i] * dx + g;
    ys[i] = xp * Q[i] + xv * f(t);
    const double gp = g * (-2 * k.k1(t) / k.k0(t) - prob.p.derivative_at(t) / pv - xp / xv);
    dys[i] = f(t) * dx + Q[i] * x.dax_slope_at(t) + gp;
  }
  return Trajectory(grid, std::move(y), std::move(dy), std::move(ys), std::move(dys));
}

std::pair<double, double> reduction_constants(const SelfAdjointProblem& prob, const Trajectory& x,
                                              const Trajectory& y, double t0) {
  x.require_span(t0);
  y.require_span(t0);
  const double x0 = x.x_at(t0);
  if (x0 == 0.0) throw DomainError("reduction_constants: x(t0) = 0");
  return {y.x_at(t0) / x0, prob.p(t0) * (x0 * y.dax_at(t0) - y.x_at(t0) * x.dax_at(t0))};
}

RiccatiProblem riccati_problem(const SelfAdjointProblem& prob) {
  return {prob.pair, prob.p, prob.q, prob.lo, prob.hi};
}

ScalarField riccati_from_solution(const SelfAdjointProblem& prob, const Trajectory& x) {
  require_nonvanishing(x, "riccati_from_solution: x");
  return (prob.p * x.dax_field() / x.x_field()).relabeled("z");
}

ScalarField riccati_from_field(const KappaPair& pair, const ScalarField& p, const ScalarField& x) {
  return (p * dalpha_field(pair, x) / x).relabeled("z");
}

ScalarField riccati_residual(const RiccatiProblem& rp, const ScalarField& z) {
  return dalpha_field(rp.pair, z) + rp.q + z * z / rp.p - rp.pair.kappa1() * z;
}

Trajectory solution_from_riccati(const RiccatiProblem& rp, const ScalarField& z, double t0, double step) {
  if (!(rp.hi > rp.lo)) throw InvalidArgument("solution_from_riccati: empty interval");
  if (t0 < rp.lo || t0 > rp.hi) throw DomainError("solution_from_riccati: t0 outside the interval");
  if (!(step > 0.0)) step = default_step(rp.lo, rp.hi);
  const KappaPair& k = rp.pair;
  const auto grid = uniform_with(rp.lo, rp.hi, step, {t0});
  const std::size_t n = grid.size();
  auto g = [&](double s) { return (z(s) / rp.p(s) - k.k1(s)) / k.k0(s); };
  const auto logx = cumulative_integral(g, grid, t0);
  std::vector<double> x(n), dax(n), xs(n), ds(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = grid[i], pv = rp.p(t), zv = z(t);
    x[i] = std::exp(logx[i]);
    if (!std::isfinite(x[i]) || x[i] == 0.0) throw NumericsError("solution_from_riccati: e_{z/p} over/underflows");
    dax[i] = zv * x[i] / pv;
    xs[i] = x[i] * g(t);
    ds[i] = (z.derivative_at(t) * x[i] + zv * xs[i]) / pv - zv * x[i] * rp.p.derivative_at(t) / (pv * pv);
  }
  return Trajectory(grid, std::move(x), std::move(dax), std::move(xs), std::move(ds));
}

ScalarField factorization_residual(const SelfAdjointProblem& prob, const FactorPair& f, const ScalarField& y) {
  const KappaPair& k = prob.pair;
  return apply_L(prob, y) - f.first * dalpha_field(k, f.second * dalpha_field(k, f.first * y));
}

FactorPair polya_factors(const SelfAdjointProblem& prob, const Trajectory& x, double a) {
  require_positive(x, "polya_factors: x");
  x.require_span(a);
  const ScalarField E = e0_field(prob.pair, a);
  const ScalarField xf = x.x_field();
  return {(E / xf).relabeled("rho1"), (prob.p * xf * xf / (E * E)).relabeled("rho2"), FactorKind::polya};
}

TrenchReport trench_factors(const SelfAdjointProblem& prob, const Trajectory& x, double a, double b) {
  if (!(b > a)) throw InvalidArgument("trench_factors: need a < b");
  x.require_span(a);
  x.require_span(b);
  TrenchReport r;
  const FactorPair polya = polya_factors(prob, x, a);
  const KappaPair& k = prob.pair;
  // delta2 d_a t as a classical density
  const ScalarField density = (1.0 / polya.second / k.kappa0()).relabeled("delta2/kappa0");
  r.delta2_integral = integral([&](double t) { return density(t); }, a, b);
  r.first_decile = integral([&](double t) { return density(t); }, a, a + 0.1 * (b - a));
  r.divergent = r.delta2_integral > 1e6 * r.first_decile;
  for (int m = 1; m <= 10; ++m) r.ladder.push_back(b - (b - a) * std::ldexp(1.0, -m));

  if (r.divergent) {
    r.factors = polya;
    double acc = 0.0, prev = a;
    for (double T : r.ladder) {
      acc += integral([&](double t) { return density(t); }, prev, T);
      r.partial.push_back(acc);
      prev = T;
    }
    return r;
  }

  // J(t) = int_t^b delta2 d_a s; gamma1 = rho1 / J, gamma2 = J^2 rho2.
  auto anti = std::make_shared<Antiderivative>([density](double t) { return density(t); }, a, b, b, 64);
  const ScalarField J = ScalarField::lazy([anti](double t) { return -(*anti)(t); },
                                          [density] { return -density; }, "J");
  r.factors = {(polya.first / J).relabeled("gamma1"), (J * J * polya.second).relabeled("gamma2"),
               FactorKind::trench};
  double acc = 0.0, prev = a;
  for (double T : r.ladder) {
    acc += integral(
        [&](double t) {
          const double j = J(t);
          return density(t) / (j * j);
        },
        prev, T);
    r.partial.push_back(acc);
    prev = T;
  }
  return r;
}

// With G = w_a e0^2(t, a) + K and K(t) = e0^2(t, a) int_a^t x h e0^2(a, r) d_a r:
// y = x Q, Q' = G / (p x^2 kappa0), D^a y = Q D^a x + G / (p x),
// G' = -2 (kappa1/kappa0) G + x h / kappa0.
Trajectory variation_of_parameters(const SelfAdjointProblem& prob, const Trajectory& x, double y_a, double w_a,
                                   double a) {
  prob.validate();
  require_positive(x, "variation_of_parameters: x");
  x.require_span(a);
  const KappaPair& k = prob.pair;
  const bool forced = !prob.h.is_zero();
  std::optional<Antiderivative> inner;
  if (forced) {
    inner.emplace(
        [&](double r) {
          const double e = e0(k, a, r);
          return x.x_at(r) * prob.h(r) * e * e / k.k0(r);
        },
        x.lo(), x.hi(), a, 64);
  }
  auto G = [&](double t) {
    const double e2 = std::pow(e0(k, t, a), 2);
    return w_a * e2 + (forced ? e2 * (*inner)(t) : 0.0);
  };
  auto f = [&](double t) {
    const double xv = x.x_at(t);
    return G(t) / (prob.p(t) * xv * xv * k.k0(t));
  };
  const auto grid = to_vector(x.grid());
  const std::size_t n = grid.size();
  auto Q = cumulative_integral(f, grid, a);
  const double q0 = y_a / x.x_at(a);
  std::vector<double> y(n), dy(n), ys(n), dys(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = grid[i];
    const double xv = x.x()[i], dx = x.dax()[i], xp = x.x_slope_at(t);
    const double pv = prob.p(t), k0 = k.k0(t);
    const double q = q0 + Q[i], g = G(t), fv = f(t);
    y[i] = xv * q;
    dy[i] = q * dx + g / (pv * xv);
    ys[i] = xp * q + xv * fv;
    const double gp = -2 * k.k1(t) / k0 * g + (forced ? xv * prob.h(t) / k0 : 0.0);
    const double px = pv * xv, pxp = prob.p.derivative_at(t) * xv + pv * xp;
    dys[i] = fv * dx + q * x.dax_slope_at(t) + gp / px - g * pxp / (px * px);
  }
  return Trajectory(grid, std::move(y), std::move(dy), std::move(ys), std::move(dys));
}

std::string to_string(RecessiveVerdict v) {
  switch (v) {
    case RecessiveVerdict::u_recessive:
      return "u_recessive";
    case RecessiveVerdict::v_recessive:
      return "v_recessive";
    default:
      return "inconclusive";
  }
}

namespace {

// +1 if the ladder densities of an integral do not decay, -1 if they drop
// below a tenth of the first one, 0 otherwise.
int growth_class(const KappaPair& k, const std::vector<double>& ladder, const std::vector<double>& cum) {
  const std::size_t m = ladder.size();
  auto density = [&](std::size_t i) { return (cum[i] - cum[i - 1]) / h1(k, ladder[i], ladder[i - 1]); };
  const double first = density(1), last = density(m - 1);
  if (last >= first) return 1;
  if (last <= 0.1 * first) return -1;
  return 0;
}

bool has_zero_on(const Trajectory& x, double lo, double hi) {
  const auto g = x.grid();
  const auto xs = x.x();
  const double scale = x.max_abs_x();
  std::optional<bool> sign;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] < lo || g[i] > hi) continue;
    if (!(std::abs(xs[i]) > 1e-8 * scale)) return true;
    const bool s = xs[i] > 0;
    if (sign && *sign != s) return true;
    sign = s;
  }
  return false;
}

}  // namespace

RecessiveReport classify_recessive_dominant(const SelfAdjointProblem& prob, const Trajectory& u,
                                            const Trajectory& v, double a, const std::vector<double>& ladder) {
  if (ladder.size() < 3) throw InvalidArgument("classify_recessive_dominant: ladder needs >= 3 points");
  for (std::size_t i = 1; i < ladder.size(); ++i)
    if (!(ladder[i] > ladder[i - 1])) throw InvalidArgument("classify_recessive_dominant: ladder must increase");
  for (double T : {ladder.front(), ladder.back()}) {
    u.require_span(T);
    v.require_span(T);
  }
  const KappaPair& k = prob.pair;
  RecessiveReport r;
  r.ladder = ladder;
  r.note = "finite-horizon heuristic: trends along the ladder stand in for limits at b";
  const double t0 = ladder.front(), t1 = ladder.back();
  if (has_zero_on(u, t0, t1) || has_zero_on(v, t0, t1)) {
    r.zeros_on_tail = true;
    r.note += "; a solution vanishes on the tail, so neither can be recessive there";
    return r;
  }

  for (double T : ladder) r.ratio.push_back(std::abs(u.x_at(T) / v.x_at(T)));
  bool dec = true, inc = true;
  for (std::size_t i = 1; i < r.ratio.size(); ++i) {
    dec = dec && r.ratio[i] < r.ratio[i - 1];
    inc = inc && r.ratio[i] > r.ratio[i - 1];
  }
  if (dec && r.ratio.back() < 0.5 * r.ratio.front()) r.ratio_trend = -1;
  if (inc && r.ratio.back() > 2.0 * r.ratio.front()) r.ratio_trend = 1;

  auto weighted = [&](const Trajectory& w) {
    std::vector<double> cum{0.0};
    for (std::size_t i = 1; i < ladder.size(); ++i) {
      cum.push_back(cum.back() + integral(
                                     [&](double t) {
                                       const double e = e0(k, t, a), wv = w.x_at(t);
                                       return e * e / (prob.p(t) * wv * wv * k.k0(t));
                                     },
                                     ladder[i - 1], ladder[i]));
    }
    return cum;
  };
  r.integral_u = weighted(u);
  r.integral_v = weighted(v);
  const int gu = growth_class(k, ladder, r.integral_u), gv = growth_class(k, ladder, r.integral_v);
  if (gu == 1 && gv == -1) r.integral_growth = -1;
  if (gv == 1 && gu == -1) r.integral_growth = 1;

  bool v_above = true, u_above = true;
  for (double t : linspace(t0, t1, 64)) {
    const double pv = prob.p(t);
    const double zu = pv * u.dax_at(t) / u.x_at(t), zv = pv * v.dax_at(t) / v.x_at(t);
    v_above = v_above && zv > zu;
    u_above = u_above && zu > zv;
  }
  r.riccati_order = v_above ? -1 : (u_above ? 1 : 0);

  if (r.ratio_trend == -1 && r.integral_growth == -1 && r.riccati_order == -1)
    r.verdict = RecessiveVerdict::u_recessive;
  else if (r.ratio_trend == 1 && r.integral_growth == 1 && r.riccati_order == 1)
    r.verdict = RecessiveVerdict::v_recessive;
  return r;
}

}  // namespace conform
