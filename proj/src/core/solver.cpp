#include "conform/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "conform/errors.hpp"
#include "conform/grid.hpp"
#include "conform/ode.hpp"

namespace conform {

namespace {

void check_interval(const KappaPair& pair, double lo, double hi) {
  if (!(hi > lo)) throw InvalidArgument("problem interval must satisfy lo < hi");
  pair.require_in_domain(lo, "interval.lo");
  pair.require_in_domain(hi, "interval.hi");
}

void check_finite(const ScalarField& f, double t, const char* name) {
  if (!std::isfinite(f(t))) {
    std::ostringstream msg;
    msg << name << " is not finite at t = " << t;
    throw DomainError(msg.str());
  }
}

double positive_p(const ScalarField& p, double t) {
  const double v = p(t);
  if (!(v > 0.0)) {
    std::ostringstream msg;
    msg << "p must stay positive; p(" << t << ") = " << v;
    throw DomainError(msg.str());
  }
  return v;
}

std::vector<double> merge_directions(const std::vector<OdeNode>& back, const std::vector<OdeNode>& fwd,
                                     std::vector<const OdeNode*>& order) {
  std::vector<double> t;
  for (std::size_t i = back.size(); i-- > 1;) {
    order.push_back(&back[i]);
    t.push_back(back[i].t);
  }
  for (const auto& n : fwd) {
    order.push_back(&n);
    t.push_back(n.t);
  }
  return t;
}

}  // namespace

void SelfAdjointProblem::validate() const {
  check_interval(pair, lo, hi);
  for (double t : linspace(lo, hi, 1024)) {
    positive_p(p, t);
    check_finite(q, t, "q");
    check_finite(h, t, "h");
  }
}

void GeneralProblem::validate() const {
  check_interval(pair, lo, hi);
  double sign = 0.0;
  for (double t : linspace(lo, hi, 1024)) {
    const double v = a(t);
    if (!(std::abs(v) > 0.0) || !std::isfinite(v)) {
      std::ostringstream msg;
      msg << "leading coefficient a vanishes at t = " << t;
      throw DomainError(msg.str());
    }
    if (sign != 0.0 && (v > 0) != (sign > 0)) throw DomainError("leading coefficient a changes sign");
    sign = v;
    check_finite(b, t, "b");
    check_finite(c, t, "c");
    check_finite(g, t, "g");
  }
}

double default_step(double lo, double hi) { return std::min(0.01, (hi - lo) / 400.0); }

// The 2-system in (x, y = p D^a x) is integrated after factoring out
// E(t) = e0(t, t0): with x = E X and y = E Y it reads
//   X' = Y / (p kappa0),   Y' = (-q X + h / E) / kappa0,
// which keeps the relative error control meaningful when e0 decays or grows.
std::vector<Trajectory> solve_ivp_batch(const SelfAdjointProblem& prob, double t0,
                                        std::span<const InitialState> states, double step) {
  if (!(step > 0.0)) throw InvalidArgument("solve_ivp: step must be positive");
  if (states.empty()) throw InvalidArgument("solve_ivp: no initial states");
  prob.validate();
  if (t0 < prob.lo || t0 > prob.hi) throw DomainError("solve_ivp: t0 outside the problem interval");

  const KappaPair& k = prob.pair;
  const ScalarField &p = prob.p, &q = prob.q, &h = prob.h;
  const bool has_h = !h.is_zero();
  const std::size_t m = states.size();

  auto E = [&](double t) { return e0(k, t, t0); };
  OdeRhs rhs = [&](double t, const std::vector<double>& y, std::vector<double>& dy) {
    const double pv = positive_p(p, t);
    const double k0 = k.k0(t);
    const double qv = q(t);
    const double forcing = has_h ? h(t) / E(t) : 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double X = y[2 * j], Y = y[2 * j + 1];
      dy[2 * j] = Y / (pv * k0);
      dy[2 * j + 1] = (-qv * X + (states[j].forced ? forcing : 0.0)) / k0;
    }
  };

  std::vector<double> y0(2 * m);
  const double p0 = positive_p(p, t0);
  for (std::size_t j = 0; j < m; ++j) {
    y0[2 * j] = states[j].x0;
    y0[2 * j + 1] = p0 * states[j].x1;
  }
  OdeOptions opt;
  opt.initial_step = opt.max_step = step;
  const auto fwd = integrate_dopri(rhs, t0, y0, prob.hi, opt);
  const auto back = integrate_dopri(rhs, t0, y0, prob.lo, opt);

  std::vector<const OdeNode*> order;
  std::vector<double> grid = merge_directions(back, fwd, order);
  const std::size_t n = grid.size();

  std::vector<Trajectory> out;
  out.reserve(m);
  std::vector<double> Ev(n), pv(n), dpv(n), k0v(n), k1v(n), qv(n), hv(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = grid[i];
    Ev[i] = E(t);
    pv[i] = p(t);
    dpv[i] = p.derivative_at(t);
    k0v[i] = k.k0(t);
    k1v[i] = k.k1(t);
    qv[i] = q(t);
    hv[i] = has_h ? h(t) : 0.0;
  }
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<double> x(n), dax(n), xs(n), ds(n);
    for (std::size_t i = 0; i < n; ++i) {
      const OdeNode& node = *order[i];
      x[i] = Ev[i] * node.y[2 * j];
      const double y = Ev[i] * node.y[2 * j + 1];
      dax[i] = y / pv[i];
      const double hj = states[j].forced ? hv[i] : 0.0;
      xs[i] = (dax[i] - k1v[i] * x[i]) / k0v[i];
      const double yslope = (-k1v[i] * y - qv[i] * x[i] + hj) / k0v[i];
      ds[i] = (yslope - dax[i] * dpv[i]) / pv[i];
    }
    out.emplace_back(grid, std::move(x), std::move(dax), std::move(xs), std::move(ds));
  }
  return out;
}

Trajectory solve_ivp(const SelfAdjointProblem& prob, const IVPSpec& ivp, double step) {
  const InitialState s{ivp.x0, ivp.x1, true};
  return solve_ivp_batch(prob, ivp.t0, std::span<const InitialState>(&s, 1), step).front();
}

// Same factoring for the general equation with w = D^a x:
//   X' = W / kappa0,   W' = (g / E - b W - c X) / (a kappa0).
Trajectory solve_general_ivp(const GeneralProblem& gp, const IVPSpec& ivp, double step) {
  if (!(step > 0.0)) throw InvalidArgument("solve_general_ivp: step must be positive");
  gp.validate();
  if (ivp.t0 < gp.lo || ivp.t0 > gp.hi) throw DomainError("solve_general_ivp: t0 outside the interval");
  const KappaPair& k = gp.pair;
  const double t0 = ivp.t0;
  const bool has_g = !gp.g.is_zero();
  auto E = [&](double t) { return e0(k, t, t0); };
  OdeRhs rhs = [&](double t, const std::vector<double>& y, std::vector<double>& dy) {
    const double av = gp.a(t);
    if (av == 0.0) throw DomainError("leading coefficient a vanishes during integration");
    const double k0 = k.k0(t);
    const double forcing = has_g ? gp.g(t) / E(t) : 0.0;
    dy[0] = y[1] / k0;
    dy[1] = (forcing - gp.b(t) * y[1] - gp.c(t) * y[0]) / (av * k0);
  };
  OdeOptions opt;
  opt.initial_step = opt.max_step = step;
  const std::vector<double> y0{ivp.x0, ivp.x1};
  const auto fwd = integrate_dopri(rhs, t0, y0, gp.hi, opt);
  const auto back = integrate_dopri(rhs, t0, y0, gp.lo, opt);
  std::vector<const OdeNode*> order;
  std::vector<double> grid = merge_directions(back, fwd, order);
  const std::size_t n = grid.size();
  std::vector<double> x(n), dax(n), xs(n), ds(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = grid[i];
    const double Ev = E(t);
    x[i] = Ev * order[i]->y[0];
    dax[i] = Ev * order[i]->y[1];
    const double k0 = k.k0(t), k1 = k.k1(t);
    xs[i] = (dax[i] - k1 * x[i]) / k0;
    const double ddw = (gp.g(t) - gp.b(t) * dax[i] - gp.c(t) * x[i]) / gp.a(t);
    ds[i] = (ddw - k1 * dax[i]) / k0;
  }
  return Trajectory(std::move(grid), std::move(x), std::move(dax), std::move(xs), std::move(ds));
}

SelfAdjointProblem to_self_adjoint(const GeneralProblem& gp, double t0, const QuadratureConfig& quad) {
  gp.validate();
  if (t0 < gp.lo || t0 > gp.hi) throw DomainError("to_self_adjoint: t0 outside the interval");
  const KappaPair& k = gp.pair;
  const ScalarField p = exp_field({gp.b / gp.a + k.kappa1(), k}, t0, quad).relabeled("p");
  SelfAdjointProblem out{k, p, (p * gp.c / gp.a).relabeled("q"),
                         gp.g.is_zero() ? ScalarField() : (gp.g * p / gp.a).relabeled("h"), gp.lo,
                         gp.hi};
  return out;
}

double wronskian(const KappaPair&, const Trajectory& x, const Trajectory& y, double t) {
  x.require_span(t);
  y.require_span(t);
  return x.x_at(t) * y.dax_at(t) - y.x_at(t) * x.dax_at(t);
}

std::pair<Trajectory, Trajectory> basis(const SelfAdjointProblem& prob, double t0, double step) {
  const double p0 = prob.p(t0);
  const InitialState states[2] = {{1.0, 0.0, false}, {0.0, 1.0 / p0, false}};
  auto v = solve_ivp_batch(prob, t0, states, step);
  return {v[0], v[1]};
}

ScalarField lx_residual(const SelfAdjointProblem& prob, const Trajectory& traj) {
  const ScalarField pd = prob.p * traj.dax_field();
  return dalpha_field(prob.pair, pd) + prob.q * traj.x_field() - prob.h;
}

ScalarField apply_L(const SelfAdjointProblem& prob, const ScalarField& x) {
  const KappaPair& k = prob.pair;
  return dalpha_field(k, prob.p * dalpha_field(k, x)) + prob.q * x;
}

ScalarField wronskian_field(const KappaPair& pair, const ScalarField& x, const ScalarField& y) {
  return x * dalpha_field(pair, y) - y * dalpha_field(pair, x);
}

}  // namespace conform
