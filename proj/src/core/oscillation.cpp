#include "conform/oscillation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "conform/errors.hpp"
#include "conform/grid.hpp"
#include "conform/structure.hpp"

namespace conform {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNonvanishing = 1e-7;
constexpr int kFanSize = 64;

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

double bisect_zero(const Trajectory& x, double lo, double hi) {
  double flo = x.x_at(lo);
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    const double fm = x.x_at(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Inverse of t -> h1(t, a) on [a, b] by bisection; h1 is increasing.
double h1_inverse(const KappaPair& pair, double a, double b, double target) {
  double lo = a, hi = b;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(b)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (h1(pair, mid, a) < target) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Smallest x/e0(t, t0) relative to its largest magnitude, signed by the
// first nonzero sample; the node at skip (if any) is excluded.
double signed_min_ratio(const Trajectory& x, double t0, std::optional<std::size_t> skip, const KappaPair& pair) {
  const auto g = x.grid();
  const auto v = x.x();
  std::vector<double> X(g.size());
  double mx = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    X[i] = v[i] / e0(pair, g[i], t0);
    mx = std::max(mx, std::abs(X[i]));
  }
  if (mx == 0.0) return 0.0;
  double sign = 0.0;
  for (std::size_t i = 0; i < g.size() && sign == 0.0; ++i)
    if (!(skip && *skip == i) && X[i] != 0.0) sign = X[i] > 0.0 ? 1.0 : -1.0;
  double mn = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.size(); ++i)
    if (!(skip && *skip == i)) mn = std::min(mn, sign * X[i]);
  return mn / mx;
}

struct Profile {
  double (*b)(double);
  double (*db)(double);
  double kink;  // < 0 when smooth
};

double tent(double th, double c) { return th <= c ? th / c : (1.0 - th) / (1.0 - c); }
double dtent(double th, double c) { return th <= c ? 1.0 / c : -1.0 / (1.0 - c); }

const std::array<Profile, 8> kProfiles{{
    {[](double th) { return std::sin(kPi * th); }, [](double th) { return kPi * std::cos(kPi * th); }, -1.0},
    {[](double th) { return std::pow(std::sin(kPi * th), 2); }, [](double th) { return kPi * std::sin(2.0 * kPi * th); },
     -1.0},
    {[](double th) { return 4.0 * th * (1.0 - th); }, [](double th) { return 4.0 * (1.0 - 2.0 * th); }, -1.0},
    {[](double th) { return tent(th, 0.5); }, [](double th) { return dtent(th, 0.5); }, 0.5},
    {[](double th) { return tent(th, 0.25); }, [](double th) { return dtent(th, 0.25); }, 0.25},
    {[](double th) { return tent(th, 0.75); }, [](double th) { return dtent(th, 0.75); }, 0.75},
    {[](double th) { return 6.75 * th * th * (1.0 - th); }, [](double th) { return 6.75 * (2.0 * th - 3.0 * th * th); },
     -1.0},
    {[](double th) { return 6.75 * th * (1.0 - th) * (1.0 - th); },
     [](double th) { return 6.75 * (1.0 - 4.0 * th + 3.0 * th * th); }, -1.0},
}};

}  // namespace

void AdmissibleField::validate() const {
  if (!(a < b)) throw InvalidArgument("admissible field: need a < b");
  const double scale = sup_abs(eta, a, b, 257);
  if (scale == 0.0) throw InvalidArgument("admissible field: eta vanishes identically");
  const double tol = 1e-12 * std::max(1.0, scale);
  if (std::abs(eta(a)) > tol || std::abs(eta(b)) > tol)
    throw InvalidArgument("admissible field: eta must vanish at both endpoints");
}

ScalarField AdmissibleField::dalpha(const KappaPair& pair) const {
  return deta ? *deta : dalpha_field(pair, eta);
}

AdmissibleField solution_cutoff(const Trajectory& u, double c, double d, double a, double b) {
  if (!(a <= c && c < d && d <= b)) throw InvalidArgument("solution_cutoff: need a <= c < d <= b");
  u.require_span(c);
  u.require_span(d);
  auto inside = [c, d](double t) { return t > c && t < d; };
  ScalarField eta([u, inside](double t) { return inside(t) ? u.x_at(t) : 0.0; },
                  [u, inside](double t) { return inside(t) ? u.x_slope_at(t) : 0.0; }, "cutoff");
  ScalarField deta([u, inside](double t) { return inside(t) ? u.dax_at(t) : 0.0; },
                   [u, inside](double t) { return inside(t) ? u.dax_slope_at(t) : 0.0; }, "D cutoff");
  return AdmissibleField{eta, a, b, {c, d}, deta};
}

std::array<AdmissibleField, 8> bump_family(const KappaPair& pair, double a, double b) {
  if (!(a < b)) throw InvalidArgument("bump_family: need a < b");
  pair.require_in_domain(a, "a");
  pair.require_in_domain(b, "b");
  const double H = h1(pair, b, a);
  const ScalarField E = e0_field(pair, a);
  const ScalarField th = h1_field(pair, a) / H;
  std::array<AdmissibleField, 8> out{};
  for (std::size_t k = 0; k < kProfiles.size(); ++k) {
    const Profile pr = kProfiles[k];
    ScalarField deta([E, th, pr, H](double t) { return E(t) * pr.db(std::clamp(th(t), 0.0, 1.0)) / H; },
                     "D bump");
    ScalarField eta([E, th, pr](double t) { return E(t) * pr.b(std::clamp(th(t), 0.0, 1.0)); },
                    [E, th, pr, H, pair](double t) {
                      const double th_t = std::clamp(th(t), 0.0, 1.0);
                      const double v = E(t) * pr.b(th_t), dv = E(t) * pr.db(th_t) / H;
                      return (dv - pair.k1(t) * v) / pair.k0(t);
                    },
                    "bump");
    std::vector<double> bps;
    if (pr.kink > 0.0) bps.push_back(h1_inverse(pair, a, b, pr.kink * H));
    out[k] = AdmissibleField{eta, a, b, std::move(bps), deta};
  }
  return out;
}

double quadratic_functional(const SelfAdjointProblem& prob, const AdmissibleField& adm, const QuadratureConfig& quad) {
  prob.validate();
  const double tol = 1e-12 * std::max(1.0, prob.hi - prob.lo);
  if (adm.a < prob.lo - tol || adm.b > prob.hi + tol) throw DomainError("quadratic_functional: [a, b] leaves the problem interval");
  const KappaPair& k = prob.pair;
  const ScalarField deta = adm.dalpha(k);
  const ScalarField w = e0_field_from(k, adm.b, quad);
  auto f = [&](double t) {
    const double e = adm.eta(t), de = deta(t), wt = w(t);
    return (prob.p(t) * de * de - prob.q(t) * e * e) * wt * wt / k.k0(t);
  };
  return integrate(f, adm.a, adm.b, adm.breakpoints, quad).value;
}

ScalarField picone1_residual(const SelfAdjointProblem& prob, const ScalarField& z, const AdmissibleField& adm) {
  const KappaPair& k = prob.pair;
  const ScalarField& eta = adm.eta;
  const ScalarField deta = adm.dalpha(k);
  const ScalarField lhs = dalpha_field(k, z * eta * eta) + k.kappa1() * z * eta * eta;
  const ScalarField sq = deta - z * eta / prob.p;
  const ScalarField rhs = prob.p * deta * deta - prob.q * eta * eta - prob.p * sq * sq;
  return (lhs - rhs).relabeled("picone1 residual");
}

void ComparisonPair::validate() const {
  prob1.validate();
  prob2.validate();
  const KappaPair &k1 = prob1.pair, &k2 = prob2.pair;
  if (prob1.lo != prob2.lo || prob1.hi != prob2.hi) throw InvalidArgument("comparison pair: intervals differ");
  if (k1.family() != k2.family() || k1.alpha() != k2.alpha() || k1.omega() != k2.omega())
    throw InvalidArgument("comparison pair: gain pairs differ");
  for (double t : linspace(prob1.lo, prob1.hi, 33))
    if (k1.k0(t) != k2.k0(t) || k1.k1(t) != k2.k1(t)) throw InvalidArgument("comparison pair: gain pairs differ");
}

// With W = (u/v)(p1 v D u - p2 u D v), the product rule gives
// D W + kappa1 W = (q2 - q1) u^2 + (p1 - p2)(D u)^2 + p2 (D u - u D v / v)^2.
ScalarField picone2_residual(const ComparisonPair& cmp, const Trajectory& u, const Trajectory& v) {
  cmp.validate();
  const KappaPair& k = cmp.prob1.pair;
  const double lo = std::max({cmp.prob1.lo, u.lo(), v.lo()});
  const double hi = std::min({cmp.prob1.hi, u.hi(), v.hi()});
  if (!(lo < hi)) throw InvalidArgument("picone2_residual: trajectories do not overlap the interval");
  double vmax = 0.0, vmin = std::numeric_limits<double>::infinity();
  bool flips = false;
  const double v0 = v.x_at(lo);
  for (double t : linspace(lo, hi, 1025)) {
    const double vv = v.x_at(t);
    flips = flips || (vv < 0.0) != (v0 < 0.0);
    vmax = std::max(vmax, std::abs(vv));
    vmin = std::min(vmin, std::abs(vv));
  }
  if (flips || !(vmin > 1e-8 * vmax)) throw DomainError("picone2_residual: v vanishes on the interval");
  const ScalarField &p1 = cmp.prob1.p, &p2 = cmp.prob2.p, &q1 = cmp.prob1.q, &q2 = cmp.prob2.q;
  const ScalarField uf = u.x_field(), du = u.dax_field(), vf = v.x_field(), dv = v.dax_field();
  const ScalarField W = (uf / vf) * (p1 * vf * du - p2 * uf * dv);
  const ScalarField lhs = dalpha_field(k, W) + k.kappa1() * W;
  const ScalarField sq = du - uf * dv / vf;
  const ScalarField rhs = (q2 - q1) * uf * uf + (p1 - p2) * du * du + p2 * sq * sq;
  return (lhs - rhs).relabeled("picone2 residual");
}

std::vector<double> find_zeros(const Trajectory& x) {
  const auto g = x.grid();
  const auto v = x.x();
  std::vector<double> out;
  auto push = [&](double z) {
    if (out.empty() || z - out.back() > 1e-9) out.push_back(z);
  };
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (v[i] == 0.0) push(g[i]);
    if (i + 1 == g.size()) break;
    double t0 = g[i], f0 = v[i];
    for (int s = 1; s <= 4; ++s) {
      const double t1 = s == 4 ? g[i + 1] : g[i] + (g[i + 1] - g[i]) * s / 4.0;
      const double f1 = s == 4 ? v[i + 1] : x.x_at(t1);
      if (f1 == 0.0 && s < 4) push(t1);
      else if (f0 != 0.0 && f1 != 0.0 && (f0 < 0.0) != (f1 < 0.0)) push(bisect_zero(x, t0, t1));
      t0 = t1;
      f0 = f1;
    }
  }
  return out;
}

DisconjugacyVerdict disconjugate(const SelfAdjointProblem& prob, double a, double b, ReidCriterion criterion,
                                 double step) {
  const SelfAdjointProblem sub = homogeneous(restricted(prob, a, b, "disconjugate"));
  step = resolve_step(a, b, step);
  const double t0 = criterion == ReidCriterion::reid_v ? a : b;
  const InitialState st{0.0, 1.0 / sub.p(t0), false};
  const Trajectory u = solve_ivp_batch(sub, t0, std::span<const InitialState>(&st, 1), step).front();
  const std::size_t skip = criterion == ReidCriterion::reid_v ? 0 : u.size() - 1;

  DisconjugacyVerdict out{};
  const double margin = 1e-8 * std::max(1.0, b - a);
  for (double z : find_zeros(u))
    if (std::abs(z - t0) > margin) out.zeros.push_back(z);
  out.min_ratio = signed_min_ratio(u, t0, skip, sub.pair);
  out.disconjugate = out.zeros.empty() && out.min_ratio > kNonvanishing;
  return out;
}

RoundaboutReport roundabout_audit(const SelfAdjointProblem& prob, double a, double b, double step) {
  const SelfAdjointProblem sub = homogeneous(restricted(prob, a, b, "roundabout_audit"));
  step = resolve_step(a, b, step);
  const double pa = sub.p(a);
  RoundaboutReport rep;

  auto fan = [&](const std::vector<double>& angles) {
    std::vector<InitialState> st;
    for (double th : angles) {
      double c = std::cos(th), s = std::sin(th);
      if (std::abs(c) < 1e-15) c = 0.0;
      if (std::abs(s) < 1e-15) s = 0.0;
      st.push_back({c, s / pa, false});
    }
    return solve_ivp_batch(sub, a, st, step);
  };
  auto score = [&](const Trajectory& x) { return signed_min_ratio(x, a, std::nullopt, sub.pair); };

  std::vector<double> angles(kFanSize);
  for (int k = 0; k < kFanSize; ++k) angles[k] = kPi * k / kFanSize;
  const std::vector<Trajectory> members = fan(angles);

  // (iv) zero counting over the fan.
  for (const Trajectory& x : members)
    rep.max_fan_zeros = std::max(rep.max_fan_zeros, static_cast<int>(find_zeros(x).size()));
  rep.criteria[3] = rep.max_fan_zeros <= 1;

  // (i) best nonvanishing candidate, refined locally around the best angle.
  std::size_t best = 0;
  std::vector<double> scores(members.size());
  for (std::size_t k = 0; k < members.size(); ++k) {
    scores[k] = score(members[k]);
    if (scores[k] > scores[best]) best = k;
  }
  double best_angle = angles[best], best_score = scores[best];
  std::optional<Trajectory> best_x = members[best];
  double width = kPi / kFanSize;
  for (int round = 0; round < 3 && best_score <= kNonvanishing; ++round) {
    std::vector<double> local(17);
    for (int k = 0; k <= 16; ++k) local[k] = best_angle - width + 2.0 * width * k / 16.0;
    const std::vector<Trajectory> xs = fan(local);
    for (std::size_t k = 0; k < xs.size(); ++k) {
      const double sc = score(xs[k]);
      if (sc > best_score) {
        best_score = sc;
        best_angle = local[k];
        best_x = xs[k];
      }
    }
    width /= 8.0;
  }
  rep.best_angle = best_angle;
  rep.criteria[0] = best_score > kNonvanishing && find_zeros(*best_x).empty();

  // (ii) z = p D x / x from the candidate must satisfy the Riccati equation.
  if (rep.criteria[0]) {
    const ScalarField z = riccati_from_solution(sub, *best_x);
    const ScalarField r = riccati_residual(riccati_problem(sub), z);
    const std::vector<double> g = linspace(a, b, 257);
    double rmax = 0.0, zmax = 0.0;
    for (double t : g) {
      rmax = std::max(rmax, std::abs(r(t)));
      zmax = std::max(zmax, std::abs(z(t)));
    }
    rep.criteria[1] = std::isfinite(rmax) && rmax <= 1e-4 * std::max(1.0, zmax);
  }

  // (iii) positivity of the functional over the bump family.
  const auto bumps = bump_family(sub.pair, a, b);
  bool positive = true;
  for (std::size_t k = 0; k < bumps.size(); ++k) {
    rep.functional[k] = quadratic_functional(sub, bumps[k]);
    positive = positive && rep.functional[k] > 0.0;
  }
  rep.criteria[2] = positive;

  rep.criteria[4] = disconjugate(sub, a, b, ReidCriterion::reid_v, step).disconjugate;
  rep.criteria[5] = disconjugate(sub, a, b, ReidCriterion::reid_vi, step).disconjugate;

  rep.all_agree = std::all_of(rep.criteria.begin(), rep.criteria.end(), [&](bool c) { return c == rep.criteria[0]; });
  rep.note = "(i) scans 64 initial angles with local refinement; (iii) uses 8 fixed bumps";
  return rep;
}

SturmReport sturm_compare(const ComparisonPair& cmp, const Trajectory& u, const Trajectory& v) {
  cmp.validate();
  SturmReport rep;
  const std::vector<double> zu = find_zeros(u);
  if (zu.size() < 2) {
    rep.note = "u has fewer than two zeros";
    return rep;
  }
  rep.u_has_two_zeros = true;
  rep.a = zu[0];
  rep.b = zu[1];
  v.require_span(rep.a);
  v.require_span(rep.b);

  const std::vector<double> g = linspace(rep.a, rep.b, 1025);
  double scale = 0.0;
  for (double t : g)
    scale = std::max({scale, std::abs(cmp.prob1.q(t)), std::abs(cmp.prob2.q(t)), cmp.prob1.p(t), cmp.prob2.p(t)});
  const double tol = 1e-12 * std::max(1.0, scale), strict_tol = 1e-9 * std::max(1.0, scale);
  bool holds = true, strict = false;
  double wmax = 0.0, umax = 0.0, vmax = 0.0, dumax = 0.0, dvmax = 0.0;
  for (double t : g) {
    const double dq = cmp.prob2.q(t) - cmp.prob1.q(t), dp = cmp.prob1.p(t) - cmp.prob2.p(t);
    holds = holds && dq >= -tol && dp >= -tol && cmp.prob2.p(t) > 0.0;
    strict = strict || dq > strict_tol || dp > strict_tol;
    const double uu = u.x_at(t), vv = v.x_at(t), du = u.dax_at(t), dv = v.dax_at(t);
    wmax = std::max(wmax, std::abs(uu * dv - vv * du));
    umax = std::max(umax, std::abs(uu));
    vmax = std::max(vmax, std::abs(vv));
    dumax = std::max(dumax, std::abs(du));
    dvmax = std::max(dvmax, std::abs(dv));
  }
  rep.hypothesis_holds = holds;
  rep.strict = strict;
  rep.independent = wmax > 1e-8 * (umax * dvmax + vmax * dumax);

  const double margin = 1e-9 * std::max(1.0, rep.b - rep.a);
  for (double z : find_zeros(v))
    if (z > rep.a + margin && z < rep.b - margin) rep.v_zero_in_between = true;

  if (!holds) rep.note = "coefficient hypothesis violated";
  else if (!strict && !rep.independent) rep.note = "no strict inequality and u, v dependent";
  rep.verdict = holds && (strict || rep.independent) && rep.v_zero_in_between;
  return rep;
}

double lyapunov_integral(const KappaPair& pair, const ScalarField& q, double a, double b,
                         std::span<const double> breakpoints, const QuadratureConfig& quad) {
  const ScalarField w = e0_field_from(pair, b, quad);
  return integrate([&](double t) { return q(t) * w(t) / pair.k0(t); }, a, b, breakpoints, quad).value;
}

LyapunovResult lyapunov_check(const SelfAdjointProblem& prob, double a, double b, const QuadratureConfig& quad,
                              double tol) {
  const SelfAdjointProblem sub = restricted(prob, a, b, "lyapunov_check");
  for (double t : linspace(a, b, 1025)) {
    if (std::abs(sub.p(t) - 1.0) > 1e-12) throw InvalidArgument("lyapunov_check: p must be identically 1");
    if (!(sub.q(t) > 0.0)) throw DomainError("lyapunov_check: q must be positive on [a, b]");
  }
  LyapunovResult r{};
  r.lhs = lyapunov_integral(sub.pair, sub.q, a, b, {}, quad);
  r.rhs = 4.0 * e0(sub.pair, b, a, quad) / h1(sub.pair, b, a, quad);
  r.necessary_holds = r.lhs >= r.rhs - tol;
  r.sufficient_disconjugacy = r.lhs < r.rhs;
  return r;
}

SharpnessSample lyapunov_sharpness(const KappaPair& pair, double delta, const QuadratureConfig& quad) {
  pair.require_in_domain(0.0, "0");
  pair.require_in_domain(1.0, "1");
  const double H1 = h1(pair, 1.0, 0.0, quad);
  const double c = h1_inverse(pair, 0.0, 1.0, 0.5 * H1);
  if (!(delta > 0.0 && delta < c && c + delta < 1.0)) throw InvalidArgument("lyapunov_sharpness: delta out of range");
  const double left = c - delta;
  const double Hl = h1(pair, left, 0.0, quad);
  const double d = 0.5 * H1 - Hl;
  const double Hr = H1 - Hl;
  const double right = h1_inverse(pair, 0.0, 1.0, Hr);

  // Profile g(H): H on the left, H1 - H on the right, concave C^2 join in between.
  auto g = [=](double H) {
    if (H <= Hl) return H;
    if (H >= Hr) return H1 - H;
    const double u = H - 0.5 * H1;
    return Hl + (d * d - u * u) / (2.0 * d) + d / (kPi * kPi) * (std::cos(kPi * u / d) + 1.0);
  };
  auto dg = [=](double H) {
    if (H <= Hl) return 1.0;
    if (H >= Hr) return -1.0;
    const double u = H - 0.5 * H1;
    return -u / d - std::sin(kPi * u / d) / kPi;
  };
  auto ddg = [=](double H) {
    if (H <= Hl || H >= Hr) return 0.0;
    const double u = H - 0.5 * H1;
    return -(1.0 + std::cos(kPi * u / d)) / d;
  };

  const ScalarField E = e0_field(pair, left, quad);
  const ScalarField E0 = e0_field(pair, 0.0, quad);
  const ScalarField H = h1_field(pair, 0.0, quad);
  const ScalarField ddax([=](double t) { return E(t) * ddg(H(t)); }, "DDx");
  const ScalarField dax([=](double t) { return E(t) * dg(H(t)); },
                        [=](double t) { return (E(t) * ddg(H(t)) - pair.k1(t) * E(t) * dg(H(t))) / pair.k0(t); },
                        "Dx");
  const ScalarField x([=](double t) { return E(t) * g(H(t)); },
                      [=](double t) { return (E(t) * dg(H(t)) - pair.k1(t) * E(t) * g(H(t))) / pair.k0(t); }, "x");
  const ScalarField q([=](double t) { return -ddg(H(t)) / g(H(t)) * E0(t); }, "q");

  SharpnessSample s{delta, c, 0.0, 0.0, 0.0, x, dax, ddax, q, {left, right}};
  s.lhs = lyapunov_integral(pair, q, 0.0, 1.0, s.breakpoints, quad);
  s.upper = 4.0 * e0(pair, 1.0, 0.0, quad) / (H1 - 2.0 * h1(pair, c, left, quad));
  s.rhs = 4.0 * e0(pair, 1.0, 0.0, quad) / H1;
  return s;
}

FlwReport flw_scan(const SelfAdjointProblem& prob, double a, const std::vector<double>& ladder, double step) {
  if (ladder.size() < 2) throw InvalidArgument("flw_scan: ladder needs at least two horizons");
  for (std::size_t i = 0; i < ladder.size(); ++i)
    if (!(ladder[i] > (i == 0 ? a : ladder[i - 1]))) throw InvalidArgument("flw_scan: ladder must increase from a");
  const double T = ladder.back();
  const SelfAdjointProblem sub = homogeneous(restricted(prob, a, T, "flw_scan"));
  const KappaPair& k = sub.pair;

  FlwReport rep;
  rep.ladder = ladder;
  const ScalarField E = e0_field(k, a);
  std::vector<double> grid{a};
  grid.insert(grid.end(), ladder.begin(), ladder.end());
  const std::vector<double> wi =
      cumulative_integral([&](double t) { return E(t) / sub.p(t) / k.k0(t); }, grid, a);
  const std::vector<double> qi = cumulative_integral([&](double t) { return sub.q(t) / k.k0(t); }, grid, a);
  rep.weight_integral.assign(wi.begin() + 1, wi.end());
  rep.q_integral.assign(qi.begin() + 1, qi.end());

  // Slope of log I against log(T - a) between the last two horizons.
  auto slope = [&](const std::vector<double>& I) {
    const std::size_t n = I.size();
    if (!(I[n - 2] > 0.0 && I[n - 1] > 0.0)) return 0.0;
    return std::log(I[n - 1] / I[n - 2]) / std::log((ladder[n - 1] - a) / (ladder[n - 2] - a));
  };
  rep.weight_slope = slope(rep.weight_integral);
  rep.q_slope = slope(rep.q_integral);
  rep.oscillation_predicted = rep.weight_slope > kFlwSlopeThreshold && rep.q_slope > kFlwSlopeThreshold;

  const InitialState st{0.0, 1.0 / sub.p(a), false};
  const Trajectory u = solve_ivp_batch(sub, a, std::span<const InitialState>(&st, 1), resolve_step(a, T, step)).front();
  const double margin = 1e-8 * std::max(1.0, T - a);
  for (double z : find_zeros(u))
    if (z - a > margin) rep.zeros.push_back(z);
  rep.note = "heuristic: divergence judged from partial integrals on a finite ladder";
  return rep;
}

}  // namespace conform
