#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "conform/errors.hpp"
#include "conform/grid.hpp"
#include "conform/oscillation.hpp"
#include "conform/structure.hpp"

using namespace conform;
using std::numbers::pi;

namespace {

const ScalarField T = ScalarField::identity();
const ScalarField ONE = ScalarField::constant(1.0);

KappaPair trig(double a) { return KappaPair::make(Family::trig, Alpha(a)); }

SelfAdjointProblem make(const KappaPair& k, ScalarField p, ScalarField q, double lo, double hi) {
  return {k, std::move(p), std::move(q), ScalarField(), lo, hi};
}

Trajectory solve(const SelfAdjointProblem& prob, double t0, double x0, double x1) {
  return solve_ivp(prob, {t0, x0, x1}, default_step(prob.lo, prob.hi));
}

double sup_on(const ScalarField& f, double lo, double hi, std::size_t n = 401) { return sup_abs(f, lo, hi, n); }

AdmissibleField scaled(const AdmissibleField& adm, const KappaPair& k, double c) {
  return {adm.eta * c, adm.a, adm.b, adm.breakpoints, adm.dalpha(k) * c};
}

}  // namespace

TEST_CASE("zeros of sin, cos_a and e0") {
  auto k1 = trig(1.0);
  auto prob = make(k1, ONE, ONE, 0.1, 6.2);
  auto zs = find_zeros(solve(prob, 0.1, std::sin(0.1), std::cos(0.1)));
  REQUIRE(zs.size() == 1);
  CHECK(std::abs(zs[0] - pi) <= 1e-9);

  auto k = trig(0.6);
  const double w = 2.0, t0 = 0.3, k0 = k.k0(0.0);
  auto osc = make(k, ONE, ScalarField::constant(w * w), t0, 8.0);
  auto c = find_zeros(solve(osc, t0, 1.0, 0.0));
  REQUIRE(!c.empty());
  for (std::size_t j = 0; j < c.size(); ++j)
    CHECK(c[j] == doctest::Approx(t0 + k0 * (pi / 2 + pi * j) / w).epsilon(1e-9));
  CHECK(t0 + k0 * (pi / 2 + pi * c.size()) / w > 8.0);

  auto flat = make(k, ONE, ScalarField(), t0, 8.0);
  CHECK(find_zeros(solve(flat, t0, 1.0, 0.0)).empty());
}

TEST_CASE("disconjugacy by the two initial value criteria") {
  for (double alpha : {0.5, 0.8, 1.0}) {
    auto k = trig(alpha);
    const double w = 1.5, a = 0.2;
    auto q = ScalarField::constant(w * w);
    const double first_zero = a + k.k0(0.0) * pi / w;  // h1(b, a) = pi/w
    for (auto crit : {ReidCriterion::reid_v, ReidCriterion::reid_vi}) {
      const double short_b = a + 0.9 * (first_zero - a), long_b = a + 1.1 * (first_zero - a);
      auto prob = make(k, ONE, q, a, long_b);
      CHECK(disconjugate(prob, a, short_b, crit).disconjugate);
      auto v = disconjugate(prob, a, long_b, crit);
      CHECK_FALSE(v.disconjugate);
      REQUIRE(v.zeros.size() == 1);
      const double expect = crit == ReidCriterion::reid_v ? first_zero : long_b - (first_zero - a);
      CHECK(v.zeros[0] == doctest::Approx(expect).epsilon(1e-8));
    }
  }
  auto tp = KappaPair::make(Family::time_power, Alpha(0.6), 1.0);
  auto flat = make(tp, 1.0 + 0.5 * sin(T), ScalarField(), 0.5, 6.0);
  CHECK(disconjugate(flat, 0.5, 6.0, ReidCriterion::reid_v).disconjugate);
  CHECK(disconjugate(flat, 0.5, 6.0, ReidCriterion::reid_vi).disconjugate);
  CHECK_THROWS_AS(disconjugate(flat, 0.1, 6.0, ReidCriterion::reid_v), DomainError);
}

TEST_CASE("quadratic functional on solution cutoffs") {
  auto k = KappaPair::make(Family::time_power, Alpha(0.7), 1.0);
  auto p = 1.0 + 0.3 * T;
  auto q = 2.0 + cos(T);
  auto prob = make(k, p, q, 0.5, 4.0);
  auto u = solve(prob, 0.5, 0.7, -0.4);
  for (auto [c, d] : {std::pair{0.9, 3.1}, {0.5, 4.0}, {1.7, 2.2}}) {
    auto adm = solution_cutoff(u, c, d, 0.5, 4.0);
    const double F = quadratic_functional(prob, adm);
    auto puDu = [&](double t) { return p(t) * u.x_at(t) * u.dax_at(t); };
    const double oracle = puDu(d) / std::pow(e0(k, d, 4.0), 2) - puDu(c) / std::pow(e0(k, c, 4.0), 2);
    CHECK(std::abs(F - oracle) <= 1e-4 * std::max(1.0, std::abs(oracle)));
    CHECK(quadratic_functional(prob, scaled(adm, k, -2.5)) == doctest::Approx(6.25 * F).epsilon(1e-8));
  }
  AdmissibleField zero{ScalarField(), 0.5, 4.0, {}, ScalarField()};
  CHECK(quadratic_functional(prob, zero) == 0.0);
  CHECK_THROWS_AS(zero.validate(), InvalidArgument);
  AdmissibleField bad{T - 0.5, 0.5, 4.0, {}, std::nullopt};
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  for (const auto& b : bump_family(k, 0.5, 4.0)) CHECK_NOTHROW(b.validate());
}

TEST_CASE("bump functional against the Rayleigh quotient") {
  // p = 1, q = w^2: F(e0 B(h1/H)) = e0^2(b, a) int_0^1 (B'^2/H - w^2 H B^2) dth.
  auto k = trig(0.6);
  const double w = 1.3, a = 0.0, b = 2.0, H = h1(k, b, a);
  auto prob = make(k, ONE, ScalarField::constant(w * w), a, b);
  auto bumps = bump_family(k, a, b);
  const double F = quadratic_functional(prob, bumps[0]);
  const double oracle = std::pow(e0(k, b, a), 2) * (pi * pi / (2 * H) - w * w * H / 2);
  CHECK(F == doctest::Approx(oracle).epsilon(1e-8));
  const double Ft = quadratic_functional(prob, bumps[3]);  // tent at 1/2
  CHECK(Ft == doctest::Approx(std::pow(e0(k, b, a), 2) * (4.0 / H - w * w * H / 3)).epsilon(1e-8));
}

TEST_CASE("Picone identity I") {
  auto k = trig(0.7);
  auto prob = make(k, 1.0 + 0.25 * cos(T), 0.8 + 0.3 * sin(T), 0.0, 1.2);
  auto x = solve(prob, 0.0, 1.0, 0.2);
  require_nonvanishing(x, "x");
  auto z = riccati_from_solution(prob, x);
  for (const auto& adm : bump_family(k, 0.0, 1.2)) {
    double worst = 0;
    for (double t : linspace(0.0, 1.2, 401))
      if (std::find(adm.breakpoints.begin(), adm.breakpoints.end(), t) == adm.breakpoints.end())
        worst = std::max(worst, std::abs(picone1_residual(prob, z, adm)(t)));
    CHECK(worst <= 1e-4);
  }
  auto flat = make(k, 1.0 + 0.25 * cos(T), ScalarField(), 0.0, 2.0);
  auto bump = bump_family(k, 0.0, 2.0)[0];
  CHECK(sup_on(picone1_residual(flat, ScalarField(), bump), 0.0, 2.0) <= 1e-12);
  AdmissibleField zero{ScalarField(), 0.0, 2.0, {}, ScalarField()};
  CHECK(sup_on(picone1_residual(prob, z, zero), 0.0, 2.0) == 0.0);
}

TEST_CASE("Picone identity II") {
  for (double alpha : {0.4, 0.75, 1.0}) {
    auto k = trig(alpha);
    auto p1 = 1.2 + 0.2 * sin(T), p2 = 1.0 + 0.1 * cos(T);
    ComparisonPair cmp{make(k, p1, 1.0 + 0.5 * T, 0.0, 0.8), make(k, p2, 0.3 + 0.1 * cos(T), 0.0, 0.8)};
    auto u = solve(cmp.prob1, 0.0, 0.3, 1.0);
    auto v = solve(cmp.prob2, 0.0, 1.0, 0.1);
    CHECK(sup_on(picone2_residual(cmp, u, v), 0.0, 0.8) <= 1e-4);

    ComparisonPair same{cmp.prob1, cmp.prob1};
    auto u2 = solve(cmp.prob1, 0.0, 1.0, 0.5);
    CHECK(sup_on(picone2_residual(same, u2, u2), 0.0, 0.8) <= 1e-9);

    // The kappa1 W term is what closes the identity for alpha < 1.
    const auto uf = u.x_field(), du = u.dax_field(), vf = v.x_field(), dv = v.dax_field();
    const auto W = (uf / vf) * (p1 * vf * du - p2 * uf * dv);
    const double gap = sup_on(k.kappa1() * W, 0.0, 0.8);
    if (alpha < 1.0) CHECK(gap > 1e-2);
    else CHECK(gap == 0.0);
  }
  auto k = trig(0.5);
  ComparisonPair cmp{make(k, ONE, ONE, 0.0, 6.0), make(k, ONE, ONE, 0.0, 6.0)};
  auto u = solve(cmp.prob1, 0.0, 1.0, 0.0);
  CHECK_THROWS_AS(picone2_residual(cmp, u, u), DomainError);
  ComparisonPair mixed{make(k, ONE, ONE, 0.0, 6.0), make(trig(0.6), ONE, ONE, 0.0, 6.0)};
  CHECK_THROWS_AS(mixed.validate(), InvalidArgument);
}

TEST_CASE("Reid roundabout audit") {
  struct Case {
    SelfAdjointProblem prob;
    bool expect;
  };
  auto k = trig(0.5);
  const double k0 = k.k0(0.0);
  std::vector<Case> cases{
      {make(trig(1.0), ONE, ONE, 0.0, pi - 0.2), true},
      {make(trig(1.0), ONE, ONE, 0.0, 2 * pi), false},
      {make(k, ONE, ONE, 0.0, 0.8 * pi * k0), true},
      {make(k, ONE, ScalarField::constant(4.0), 0.0, pi * k0), false},
      {make(trig(0.3), exp(0.1 * T), ScalarField(), 0.0, 4.0), true},
  };
  for (const auto& c : cases) {
    auto rep = roundabout_audit(c.prob, c.prob.lo, c.prob.hi);
    CHECK(rep.all_agree);
    for (bool crit : rep.criteria) CHECK(crit == c.expect);
    if (c.expect) CHECK(rep.max_fan_zeros <= 1);
    else CHECK(rep.max_fan_zeros >= 2);
  }
}

TEST_CASE("Sturm comparison") {
  for (double alpha : {0.6, 1.0}) {
    auto k = trig(alpha);
    const double k0 = k.k0(0.0), hi = 8.0;
    ComparisonPair cmp{make(k, ONE, ONE, 0.0, hi), make(k, ONE, ScalarField::constant(4.0), 0.0, hi)};
    auto u = solve(cmp.prob1, 0.0, 0.0, 1.0);  // sin_a(1; t, 0)
    auto v = solve(cmp.prob2, 0.0, 0.0, 2.0);  // sin_a(2; t, 0)
    auto rep = sturm_compare(cmp, u, v);
    REQUIRE(rep.u_has_two_zeros);
    CHECK(rep.a == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
    CHECK(rep.b == doctest::Approx(pi * k0).epsilon(1e-8));
    CHECK(rep.hypothesis_holds);
    CHECK(rep.strict);
    CHECK(rep.verdict);
    auto vz = find_zeros(v);
    REQUIRE(vz.size() >= 2);
    CHECK(vz[1] == doctest::Approx(pi * k0 / 2).epsilon(1e-8));

    ComparisonPair same{cmp.prob1, cmp.prob1};
    auto dup = sturm_compare(same, u, u);
    CHECK(dup.hypothesis_holds);
    CHECK_FALSE(dup.strict);
    CHECK_FALSE(dup.independent);
    CHECK_FALSE(dup.verdict);

    auto swapped = sturm_compare(ComparisonPair{cmp.prob2, cmp.prob1}, v, u);
    CHECK_FALSE(swapped.hypothesis_holds);
    CHECK_FALSE(swapped.verdict);
  }
}

TEST_CASE("Lyapunov inequality") {
  const double w = 1.7;
  auto c1 = make(trig(1.0), ONE, ScalarField::constant(w * w), 0.0, pi / w);
  auto r1 = lyapunov_check(c1, 0.0, pi / w);
  CHECK(r1.lhs == doctest::Approx(w * pi).epsilon(1e-10));
  CHECK(r1.rhs == doctest::Approx(4 * w / pi).epsilon(1e-12));
  CHECK(r1.necessary_holds);

  for (double alpha : {0.3, 0.6, 0.9}) {
    auto k = trig(alpha);
    const double K = k.k1(0.0), H = pi / w, b = H * k.k0(0.0);
    auto prob = make(k, ONE, ScalarField::constant(w * w), 0.0, b);
    auto r = lyapunov_check(prob, 0.0, b);
    CHECK(r.lhs == doctest::Approx(w * w * (1 - std::exp(-K * H)) / K).epsilon(1e-9));
    CHECK(r.rhs == doctest::Approx(4 * std::exp(-K * H) / H).epsilon(1e-12));
    CHECK(r.necessary_holds);
    CHECK_FALSE(r.sufficient_disconjugacy);
    CHECK_FALSE(disconjugate(prob, 0.0, b, ReidCriterion::reid_v).disconjugate);

    const double bs = 0.3 * b;
    auto s = lyapunov_check(prob, 0.0, bs);
    CHECK(s.sufficient_disconjugacy);
    CHECK(disconjugate(prob, 0.0, bs, ReidCriterion::reid_v).disconjugate);
  }

  auto k = trig(0.5);
  CHECK_THROWS_AS(lyapunov_check(make(k, ONE, sin(T), 0.0, 4.0), 0.0, 4.0), DomainError);
  CHECK_THROWS_AS(lyapunov_check(make(k, 2.0 * ONE, ONE, 0.0, 1.0), 0.0, 1.0), InvalidArgument);
}

TEST_CASE("Lyapunov sharpness construction") {
  for (double alpha : {1.0, 0.7, 0.4}) {
    auto k = trig(alpha);
    double prev = std::numeric_limits<double>::infinity();
    for (double delta : {0.2, 0.1, 0.05}) {
      auto s = lyapunov_sharpness(k, delta);
      CHECK(h1(k, s.c, 0.0) == doctest::Approx(h1(k, 1.0, s.c)).epsilon(1e-12));
      CHECK(s.lhs <= s.upper * (1 + 1e-10));
      CHECK(s.upper > s.rhs);
      CHECK(s.upper / s.rhs < prev);
      prev = s.upper / s.rhs;
      CHECK(std::abs(s.x(0.0)) <= 1e-14);
      CHECK(std::abs(s.x(1.0)) <= 1e-12);
      double drift = 0, residual = 0;
      for (double t : linspace(0.01, 0.99, 197)) {
        CHECK(s.x(t) > 0.0);
        CHECK(s.ddax(t) <= 1e-14);
        drift = std::max(drift, std::abs(dalpha(k, s.x, t) - s.dax(t)) + std::abs(dalpha(k, s.dax, t) - s.ddax(t)));
        residual = std::max(residual, std::abs(s.ddax(t) + s.q(t) * s.x(t)));
      }
      CHECK(drift <= 1e-7);
      if (alpha == 1.0) {
        CHECK(residual <= 1e-12);
        CHECK(s.lhs >= s.rhs);
      } else {
        CHECK(residual > 1e-6);  // the e0(t, 0) factor in q breaks L x = 0
      }
    }
    CHECK(prev < 1.2);
  }
  CHECK_THROWS_AS(lyapunov_sharpness(trig(0.5), 0.6), InvalidArgument);
  CHECK_THROWS_AS(lyapunov_sharpness(KappaPair::make(Family::time_power, Alpha(0.5), 1.0), 0.1), DomainError);
}

TEST_CASE("FLW scan") {
  const double w = 1.5;
  auto k1 = trig(1.0);
  auto harmonic = make(k1, ONE, ScalarField::constant(w * w), 0.0, 80.0);
  auto rep = flw_scan(harmonic, 0.0, {10.0, 20.0, 40.0, 80.0});
  CHECK(rep.weight_slope == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(rep.q_slope == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(rep.oscillation_predicted);
  CHECK(rep.zeros.size() == static_cast<std::size_t>(std::floor(80.0 * w / pi)));

  auto flat = make(k1, ONE, ScalarField(), 0.0, 80.0);
  auto none = flw_scan(flat, 0.0, {10.0, 20.0, 40.0, 80.0});
  CHECK(none.q_slope == 0.0);
  CHECK_FALSE(none.oscillation_predicted);
  CHECK(none.zeros.empty());

  // 0 < p <= 1 and q >= w^2.
  auto p = 1.0 / (1.0 + 0.5 * sin(T) * sin(T));
  auto q = w * w + 0.5 * cos(T) * cos(T);
  auto ex = flw_scan(make(k1, p, q, 0.0, 60.0), 0.0, {15.0, 30.0, 60.0});
  CHECK(ex.oscillation_predicted);
  CHECK(static_cast<double>(ex.zeros.size()) >= std::floor(60.0 * w / pi) - 1);

  // For alpha < 1, e0(t, a)/p is integrable: only the zero count carries over.
  auto k = trig(0.6);
  auto frac = flw_scan(make(k, p, q, 0.0, 60.0), 0.0, {15.0, 30.0, 60.0});
  CHECK(frac.weight_slope < kFlwSlopeThreshold);
  CHECK(static_cast<double>(frac.zeros.size()) >= std::floor(h1(k, 60.0, 0.0) * w / pi) - 1);

  CHECK_THROWS_AS(flw_scan(harmonic, 0.0, {10.0}), InvalidArgument);
  CHECK_THROWS_AS(flw_scan(harmonic, 0.0, {20.0, 10.0}), InvalidArgument);
}
