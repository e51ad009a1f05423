#include "conform/greens.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "conform/errors.hpp"
#include "conform/grid.hpp"
#include "conform/oscillation.hpp"
#include "conform/parallel.hpp"

namespace conform {

namespace {

double resolve_step(double lo, double hi, double step) { return step > 0.0 ? step : default_step(lo, hi); }

SelfAdjointProblem restricted(const SelfAdjointProblem& prob, double a, double b, const char* what) {
  if (!(a < b)) throw InvalidArgument(std::string(what) + ": need a < b");
  const double tol = 1e-12 * std::max(1.0, prob.hi - prob.lo);
  if (a < prob.lo - tol || b > prob.hi + tol) throw DomainError(std::string(what) + ": [a, b] leaves the problem interval");
  SelfAdjointProblem sub = prob;
  sub.lo = a;
  sub.hi = b;
  sub.validate();
  return sub;
}

SelfAdjointProblem homogeneous(SelfAdjointProblem prob) {
  prob.h = ScalarField();
  return prob;
}

std::vector<double> default_grid(std::vector<double> grid, double a, double b, const char* what) {
  if (grid.empty()) return linspace(a, b, kDefaultKernelGrid);
  if (grid.size() < 4) throw InvalidArgument(std::string(what) + ": grid needs at least 4 points");
  const double tol = 1e-12 * std::max(1.0, b - a);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < a - tol || grid[i] > b + tol) throw DomainError(std::string(what) + ": grid leaves [a, b]");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw InvalidArgument(std::string(what) + ": grid must increase");
  }
  return grid;
}

// Boundary functionals of the spec applied to (x, D^a x) at a and b.
struct Rows {
  BVPSpec spec;
  double E;  // e0(a, b)
  double first(double xa, double da, double xb, double) const {
    return spec.kind == BVPKind::periodic ? xa - E * xb : spec.xi * xa - spec.beta * da;
  }
  double second(double, double da, double xb, double db) const {
    return spec.kind == BVPKind::periodic ? da - E * db : spec.gamma * xb + spec.delta * db;
  }
  double first(const Trajectory& x, double a, double b) const {
    return first(x.x_at(a), x.dax_at(a), x.x_at(b), x.dax_at(b));
  }
  double second(const Trajectory& x, double a, double b) const {
    return second(x.x_at(a), x.dax_at(a), x.x_at(b), x.dax_at(b));
  }
};

BoundaryMatrix matrix_of(const Rows& rows, const Trajectory& phi1, const Trajectory& phi2, double a, double b) {
  BoundaryMatrix bm;
  bm.m = {{{rows.first(phi1, a, b), rows.first(phi2, a, b)}, {rows.second(phi1, a, b), rows.second(phi2, a, b)}}};
  bm.det = bm.m[0][0] * bm.m[1][1] - bm.m[0][1] * bm.m[1][0];
  double n2 = 0.0;
  for (const auto& row : bm.m)
    for (double v : row) n2 += v * v;
  bm.norm = std::sqrt(n2);
  bm.degenerate = n2 == 0.0 || !(std::abs(bm.det) >= 1e-10 * n2);
  return bm;
}

struct Shooting {
  Trajectory phi1, phi2;
  BoundaryMatrix bm;
};

Shooting shoot(const SelfAdjointProblem& sub, const BVPSpec& spec, double step) {
  const double a = sub.lo, b = sub.hi;
  const std::array<InitialState, 2> st{{{1.0, 0.0, false}, {0.0, 1.0, false}}};
  auto sols = solve_ivp_batch(sub, a, st, step);
  BoundaryMatrix bm = matrix_of(Rows{spec, e0(sub.pair, a, b)}, sols[0], sols[1], a, b);
  if (sub.q.is_zero() && spec.kind != BVPKind::periodic)
    bm.closed_form_det = e0(sub.pair, b, a) * sub.p(a) * q_zero_determinant(sub.pair, sub.p, spec, a, b);
  return {std::move(sols[0]), std::move(sols[1]), bm};
}

void require_nondegenerate(const BoundaryMatrix& bm, const char* what) {
  if (!bm.degenerate) return;
  std::ostringstream os;
  os << what << ": homogeneous boundary problem has nontrivial solutions (det = " << bm.det
     << ", |M| = " << bm.norm << ")";
  throw DegenerateProblem(os.str(), bm.det);
}

std::array<double, 2> solve2(const BoundaryMatrix& bm, double r0, double r1) {
  const auto& m = bm.m;
  return {(r0 * m[1][1] - m[0][1] * r1) / bm.det, (m[0][0] * r1 - r0 * m[1][0]) / bm.det};
}

// Node-wise linear combination of trajectories sharing one grid.
Trajectory combine(const std::vector<std::pair<double, const Trajectory*>>& terms) {
  const auto g0 = terms.front().second->grid();
  const std::vector<double> grid(g0.begin(), g0.end());
  const std::size_t n = grid.size();
  std::vector<double> x(n, 0.0), dax(n, 0.0), xs(n, 0.0), ds(n, 0.0);
  for (const auto& [c, tr] : terms) {
    if (tr->size() != n) throw NumericsError("combine: trajectories do not share a grid");
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += c * tr->x()[i];
      dax[i] += c * tr->dax()[i];
      xs[i] += c * tr->x_slope_at(grid[i]);
      ds[i] += c * tr->dax_slope_at(grid[i]);
    }
  }
  return Trajectory(grid, std::move(x), std::move(dax), std::move(xs), std::move(ds));
}

}  // namespace

std::string to_string(BVPKind k) {
  switch (k) {
    case BVPKind::general: return "general";
    case BVPKind::conjugate: return "conjugate";
    case BVPKind::focal: return "focal";
    case BVPKind::periodic: return "periodic";
  }
  return "?";
}

BVPSpec BVPSpec::general(double xi, double beta, double gamma, double delta, double A, double B) {
  return {BVPKind::general, xi, beta, gamma, delta, A, B};
}
BVPSpec BVPSpec::conjugate(double A, double B) { return {BVPKind::conjugate, 1.0, 0.0, 1.0, 0.0, A, B}; }
BVPSpec BVPSpec::focal(double A, double B) { return {BVPKind::focal, 1.0, 0.0, 0.0, 1.0, A, B}; }
BVPSpec BVPSpec::periodic(double A, double B) { return {BVPKind::periodic, 0.0, 0.0, 0.0, 0.0, A, B}; }

void BVPSpec::validate() const {
  for (double v : {xi, beta, gamma, delta, A, B})
    if (!std::isfinite(v)) throw InvalidArgument("boundary data must be finite");
  switch (kind) {
    case BVPKind::general:
      if (xi == 0.0 && beta == 0.0) throw InvalidArgument("boundary condition at a is empty: (xi, beta) = (0, 0)");
      if (gamma == 0.0 && delta == 0.0) throw InvalidArgument("boundary condition at b is empty: (gamma, delta) = (0, 0)");
      break;
    case BVPKind::conjugate:
      if (xi != 1.0 || beta != 0.0 || gamma != 1.0 || delta != 0.0)
        throw InvalidArgument("conjugate conditions are (xi, beta, gamma, delta) = (1, 0, 1, 0)");
      break;
    case BVPKind::focal:
      if (xi != 1.0 || beta != 0.0 || gamma != 0.0 || delta != 1.0)
        throw InvalidArgument("focal conditions are (xi, beta, gamma, delta) = (1, 0, 0, 1)");
      break;
    case BVPKind::periodic: break;
  }
}

BVPSpec BVPSpec::homogeneous() const {
  BVPSpec s = *this;
  s.A = s.B = 0.0;
  return s;
}

double q_zero_determinant(const KappaPair& pair, const ScalarField& p, const BVPSpec& spec, double a, double b,
                          const QuadratureConfig& quad) {
  const double P = integral([&](double t) { return 1.0 / (p(t) * pair.k0(t)); }, a, b, quad);
  return spec.xi * spec.gamma * P + spec.beta * spec.gamma / p(a) + spec.xi * spec.delta / p(b);
}

BoundaryMatrix boundary_matrix(const SelfAdjointProblem& prob, const BVPSpec& spec, double a, double b, double step) {
  spec.validate();
  const SelfAdjointProblem sub = homogeneous(restricted(prob, a, b, "boundary_matrix"));
  return shoot(sub, spec, resolve_step(a, b, step)).bm;
}

Trajectory solve_bvp(const SelfAdjointProblem& prob, const BVPSpec& spec, double a, double b, double step) {
  spec.validate();
  const SelfAdjointProblem sub = restricted(prob, a, b, "solve_bvp");
  step = resolve_step(a, b, step);
  const std::array<InitialState, 3> st{{{0.0, 0.0, true}, {1.0, 0.0, false}, {0.0, 1.0, false}}};
  auto sols = solve_ivp_batch(sub, a, st, step);
  const Rows rows{spec, e0(sub.pair, a, b)};
  const BoundaryMatrix bm = matrix_of(rows, sols[1], sols[2], a, b);
  require_nondegenerate(bm, "solve_bvp");
  const auto c = solve2(bm, spec.A - rows.first(sols[0], a, b), spec.B - rows.second(sols[0], a, b));
  return combine({{1.0, &sols[0]}, {c[0], &sols[1]}, {c[1], &sols[2]}});
}

GreenKernel::GreenKernel(double a, double b, std::vector<double> grid, BVPSpec spec, BranchEval eval,
                         std::string method)
    : a_(a), b_(b), spec_(spec), eval_(std::move(eval)), method_(std::move(method)),
      samples_(grid, grid, [ev = eval_](double t, double s) {
        const GreenSample g = ev(t, s);
        return t <= s ? g.u : g.v;
      }) {
  for (double s : samples_.s_grid()) {
    const GreenSample g = eval_(s, s);
    continuity_ = std::max(continuity_, std::abs(g.u.value - g.v.value));
  }
  if (!(continuity_ <= kContinuityTol)) {
    std::ostringstream os;
    os << "Green's function branches disagree on the diagonal by " << continuity_;
    throw NumericsError(os.str());
  }
}

KernelPoint GreenKernel::operator()(double t, double s) const {
  const GreenSample g = eval_(t, s);
  return t <= s ? g.u : g.v;
}

KernelPoint GreenKernel::branch(GreenBranch br, double t, double s) const {
  const GreenSample g = eval_(t, s);
  return br == GreenBranch::u ? g.u : g.v;
}

GreenKernel green_phipsi(const SelfAdjointProblem& prob, const BVPSpec& spec, double a, double b,
                         std::vector<double> grid, double step) {
  spec.validate();
  if (spec.kind == BVPKind::periodic) throw InvalidArgument("green_phipsi: periodic conditions are not separated");
  const SelfAdjointProblem sub = homogeneous(restricted(prob, a, b, "green_phipsi"));
  step = resolve_step(a, b, step);
  grid = default_grid(std::move(grid), a, b, "green_phipsi");
  require_nondegenerate(shoot(sub, spec, step).bm, "green_phipsi");

  const Trajectory phi = solve_ivp(sub, {a, spec.beta, spec.xi}, step);
  const Trajectory psi = solve_ivp(sub, {b, spec.delta, -spec.gamma}, step);
  const ScalarField p = sub.p;
  auto eval = [phi, psi, p](double t, double s) {
    const double ps = phi.x_at(s), qs = psi.x_at(s);
    const double pw = p(s) * (ps * psi.dax_at(s) - qs * phi.dax_at(s));
    return GreenSample{{phi.x_at(t) * qs / pw, phi.dax_at(t) * qs / pw},
                       {psi.x_at(t) * ps / pw, psi.dax_at(t) * ps / pw}};
  };
  return GreenKernel(a, b, std::move(grid), spec.homogeneous(), std::move(eval), "phipsi");
}

GreenKernel green_cauchy(const SelfAdjointProblem& prob, const BVPSpec& spec, double a, double b,
                         std::vector<double> grid, double step) {
  spec.validate();
  const SelfAdjointProblem sub = homogeneous(restricted(prob, a, b, "green_cauchy"));
  step = resolve_step(a, b, step);
  grid = default_grid(std::move(grid), a, b, "green_cauchy");
  Shooting sh = shoot(sub, spec, step);
  require_nondegenerate(sh.bm, "green_cauchy");

  const Kernel K = cauchy_kernel(sub, CauchyMethod::ivp_sweep, grid, step);
  const Rows rows{spec, e0(sub.pair, a, b)};
  const BoundaryMatrix bm = sh.bm;
  const Trajectory phi1 = sh.phi1, phi2 = sh.phi2;
  auto eval = [K, rows, bm, phi1, phi2, a, b](double t, double s) {
    const KernelPoint xb = K(b, s);
    std::array<double, 2> c{};
    if (rows.spec.kind == BVPKind::periodic) {
      c = solve2(bm, rows.E * xb.value, rows.E * xb.dax);
    } else {
      c = solve2(bm, 0.0, -rows.second(0.0, 0.0, xb.value, xb.dax));
    }
    const KernelPoint x = K(t, s);
    const KernelPoint u{c[0] * phi1.x_at(t) + c[1] * phi2.x_at(t), c[0] * phi1.dax_at(t) + c[1] * phi2.dax_at(t)};
    return GreenSample{u, {u.value + x.value, u.dax + x.dax}};
  };
  return GreenKernel(a, b, std::move(grid), spec.homogeneous(), std::move(eval), "cauchy");
}

GreenKernel green_periodic(const SelfAdjointProblem& prob, double a, double b, std::vector<double> grid,
                           double step) {
  return green_cauchy(prob, BVPSpec::periodic(), a, b, std::move(grid), step);
}

GreenKernel green_closed_form(const KappaPair& pair, const ScalarField& p, double a, double b, BVPKind kind,
                              std::vector<double> grid, const QuadratureConfig& quad) {
  if (kind != BVPKind::conjugate && kind != BVPKind::focal)
    throw InvalidArgument("green_closed_form: only conjugate and focal kinds have closed forms");
  if (!(a < b)) throw InvalidArgument("green_closed_form: need a < b");
  pair.require_in_domain(a, "a");
  pair.require_in_domain(b, "b");
  for (double t : linspace(a, b, 1024))
    if (!(p(t) > 0.0)) throw DomainError("green_closed_form: p must be positive");
  grid = default_grid(std::move(grid), a, b, "green_closed_form");

  auto P = std::make_shared<Antiderivative>([pair, p](double t) { return 1.0 / (p(t) * pair.k0(t)); }, a, b, a,
                                            256, quad);
  const double Pb = (*P)(b);
  auto eval = [pair, p, P, Pb, kind, quad](double t, double s) {
    const double E = e0(pair, t, s, quad), Pt = (*P)(t), Ps = (*P)(s), pt = p(t);
    if (kind == BVPKind::conjugate)
      return GreenSample{{-E * Pt * (Pb - Ps) / Pb, -E * (Pb - Ps) / (Pb * pt)},
                         {-E * Ps * (Pb - Pt) / Pb, E * Ps / (Pb * pt)}};
    return GreenSample{{-E * Pt, -E / pt}, {-E * Ps, 0.0}};
  };
  const BVPSpec spec = kind == BVPKind::conjugate ? BVPSpec::conjugate() : BVPSpec::focal();
  return GreenKernel(a, b, std::move(grid), spec, std::move(eval), "closed_form");
}

ScalarField linear_weight_p(const KappaPair& pair) { return (1.0 / pair.kappa0()).relabeled("1/kappa0"); }

Trajectory apply_green(const GreenKernel& G, const KappaPair& pair, const ScalarField& h, const QuadratureConfig& quad,
                       std::vector<double> out_grid) {
  const double a = G.a(), b = G.b();
  out_grid = out_grid.empty() ? G.grid() : default_grid(std::move(out_grid), a, b, "apply_green");
  const std::size_t n = out_grid.size();
  std::vector<double> x(n, 0.0), dax(n, 0.0), xs(n, 0.0), ds(n, 0.0);
  if (h.is_zero()) return Trajectory(std::move(out_grid), std::move(x), std::move(dax), std::move(xs), std::move(ds));

  auto part = [&](double t, GreenBranch br, double lo, double hi, bool d) {
    if (!(hi > lo)) return 0.0;
    return integrate(
               [&](double s) {
                 const KernelPoint kp = G.branch(br, t, s);
                 return (d ? kp.dax : kp.value) * h(s) / pair.k0(s);
               },
               lo, hi, quad)
        .value;
  };
  auto dax_of = [&](double t) { return part(t, GreenBranch::v, a, t, true) + part(t, GreenBranch::u, t, b, true); };
  // Slope of the D^a x channel by fourth-order differences of the representation
  // (one-sided near the ends), so no spline end effects enter the residual.
  const double step = 1e-3 * (b - a);
  parallel_for(n, [&](std::size_t i) {
    const double t = out_grid[i];
    x[i] = part(t, GreenBranch::v, a, t, false) + part(t, GreenBranch::u, t, b, false);
    dax[i] = dax_of(t);
    if (t - 2 * step >= a && t + 2 * step <= b) {
      ds[i] = (dax_of(t - 2 * step) - 8 * dax_of(t - step) + 8 * dax_of(t + step) - dax_of(t + 2 * step)) / (12 * step);
    } else {
      const double dir = t - 2 * step < a ? 1.0 : -1.0, d = dir * step;
      ds[i] = (-25 * dax[i] + 48 * dax_of(t + d) - 36 * dax_of(t + 2 * d) + 16 * dax_of(t + 3 * d) -
               3 * dax_of(t + 4 * d)) /
              (12 * d);
    }
    xs[i] = (dax[i] - pair.k1(t) * x[i]) / pair.k0(t);
  });
  return Trajectory(std::move(out_grid), std::move(x), std::move(dax), std::move(xs), std::move(ds));
}

GreenAudit audit_green(const GreenKernel& G, const SelfAdjointProblem& prob, const ComparisonProbe& probe) {
  const double a = G.a(), b = G.b();
  const SelfAdjointProblem sub = restricted(prob, a, b, "audit_green");
  const Kernel& S = G.samples();
  const auto& g = S.t_grid();
  const std::size_t n = g.size();
  GreenAudit rep;
  rep.continuity_defect = G.continuity_defect();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double t = g[i], s = g[j];
      const double r = e0(sub.pair, s, t) * S.value(i, j) - e0(sub.pair, t, s) * S.value(j, i);
      rep.symmetry_residual = std::max(rep.symmetry_residual, std::abs(r));
    }

  const bool conj = G.spec().kind == BVPKind::conjugate;
  const bool disc = conj && disconjugate(sub, a, b, ReidCriterion::reid_v).disconjugate;
  rep.negativity_applicable = disc;
  rep.max_interior = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < n; ++i)
    for (std::size_t j = 1; j + 1 < n; ++j) rep.max_interior = std::max(rep.max_interior, S.value(i, j));
  rep.negative = rep.max_interior < 0.0;

  bool probe_ok = probe.at_a >= 0.0 && probe.at_b >= 0.0;
  for (double t : linspace(a, b, 1024)) probe_ok = probe_ok && probe.drive(t) <= 0.0;
  rep.comparison_applicable = disc && probe_ok;
  if (rep.comparison_applicable) {
    SelfAdjointProblem w_prob = sub;
    w_prob.h = probe.drive;
    const Trajectory w = solve_bvp(w_prob, BVPSpec::conjugate(probe.at_a, probe.at_b), a, b);
    rep.comparison_min = *std::min_element(w.x().begin(), w.x().end());
    rep.comparison_holds = rep.comparison_min >= -1e-10 * std::max(1.0, w.max_abs_x());
  }
  if (!conj) rep.note = "negativity and comparison apply to conjugate kernels only";
  else if (!disc) rep.note = "equation not disconjugate on [a, b]";
  else if (!probe_ok) rep.note = "comparison probe violates L u <= L v or the endpoint order";
  return rep;
}

double pi_star(const KappaPair& pair, double target, const QuadratureConfig& quad) {
  if (!(target > 0.0) || !std::isfinite(target)) throw InvalidArgument("pi_star: target must be positive");
  const Domain dom = pair.domain();
  std::function<double(double)> H;
  if (dom.contains(0.0)) {
    H = [&](double t) { return h1(pair, t, 0.0, quad); };
  } else if (dom.lo == 0.0 && pair.inverse_primitive() && std::isfinite(pair.inverse_primitive()(0.0))) {
    const auto F = pair.inverse_primitive();
    H = [F](double t) { return F(t) - F(0.0); };
  } else {
    throw DomainError("pi_star: h1(t, 0) is not defined for this pair");
  }
  double lo = 0.0, hi = 1.0;
  while (H(hi) < target) {
    lo = hi;
    hi *= 2.0;
    if (!(hi < dom.hi) || hi > 1e12) throw DomainError("pi_star: target is not reached inside the domain");
  }
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (H(mid) < target) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace conform
