#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "conform/errors.hpp"
#include "conform/grid.hpp"
#include "conform/solver.hpp"

using namespace conform;
using std::numbers::pi;

namespace {

const ScalarField T = ScalarField::identity();

KappaPair trig(double a) { return KappaPair::make(Family::trig, Alpha(a)); }

}  // namespace

TEST_CASE("harmonic equation reproduces cos_a and sin_a") {
  for (double a : {0.3, 0.6, 1.0}) {
    auto k = trig(a);
    const double w = 2.0, t0 = 0.0;
    SelfAdjointProblem prob{k, ScalarField::constant(1.0), ScalarField::constant(w * w), ScalarField(), -1.0, 4.0};
    auto c = solve_ivp(prob, {t0, 1.0, 0.0}, default_step(prob.lo, prob.hi));
    auto s = solve_ivp(prob, {t0, 0.0, w}, default_step(prob.lo, prob.hi));
    for (double t : linspace(-1.0, 4.0, 37)) {
      // e0 cos(w h1) computed here from the closed exponent
      const double E = std::exp(-k.k1(0) / k.k0(0) * (t - t0)), H = (t - t0) / k.k0(0);
      CHECK(std::abs(c.x_at(t) - E * std::cos(w * H)) <= 1e-7 * std::max(1.0, E));
      CHECK(std::abs(c.dax_at(t) + w * E * std::sin(w * H)) <= 1e-7 * std::max(1.0, E));
      CHECK(std::abs(s.x_at(t) - E * std::sin(w * H)) <= 1e-7 * std::max(1.0, E));
    }
  }
}

TEST_CASE("alpha = 1 reduces to x'' = 1") {
  SelfAdjointProblem prob{trig(1.0), ScalarField::constant(1.0), ScalarField(), ScalarField::constant(1.0), 0.0, 2.0};
  auto x = solve_ivp(prob, {0.0, 0.0, 0.0}, 0.01);
  for (double t : {0.3, 1.0, 1.77, 2.0}) {
    CHECK(x.x_at(t) == doctest::Approx(t * t / 2).epsilon(1e-10));
    CHECK(x.dax_at(t) == doctest::Approx(t).epsilon(1e-10));
  }
}

TEST_CASE("forcing by e0 gives e0 h1^2 / 2") {
  for (auto k : {trig(0.4), KappaPair::make(Family::time_power, Alpha(0.5), 1.0),
                 KappaPair::make(Family::power, Alpha(0.7), 2.0)}) {
    const double t0 = 1.0;
    SelfAdjointProblem prob{k, ScalarField::constant(1.0), ScalarField(), e0_field(k, t0), 0.5, 5.0};
    auto x = solve_ivp(prob, {t0, 0.0, 0.0}, default_step(prob.lo, prob.hi));
    for (double t : linspace(0.5, 5.0, 19)) {
      const double E = e0(k, t, t0), H = h1(k, t, t0);
      CHECK(std::abs(x.x_at(t) - E * H * H / 2) <= 1e-7 * std::max(1.0, std::abs(E * H * H)));
      CHECK(std::abs(x.dax_at(t) - E * H) <= 1e-7 * std::max(1.0, std::abs(E * H)));
    }
  }
}

TEST_CASE("residual of a solved trajectory is small") {
  auto k = KappaPair::make(Family::time_power, Alpha(0.6), 1.3);
  SelfAdjointProblem prob{k, 1.0 + 0.5 * sin(T), T, cos(T), 0.5, 4.0};
  auto x = solve_ivp(prob, {1.0, 1.0, -0.5}, default_step(prob.lo, prob.hi));
  const auto r = lx_residual(prob, x);
  CHECK(sup_abs(r, 0.55, 3.95) <= 1e-5 * std::max(1.0, x.max_abs_x()));
}

TEST_CASE("Abel: p W / e0^2 is constant") {
  auto k = KappaPair::make(Family::power, Alpha(0.5), 1.0);
  const double t0 = 0.0;
  SelfAdjointProblem prob{k, 2.0 + cos(T), 1.0 + 0.3 * T, ScalarField(), -1.0, 3.0};
  auto [u, v] = basis(prob, t0, default_step(prob.lo, prob.hi));
  const double c0 = prob.p(t0) * wronskian(k, u, v, t0);
  CHECK(c0 == doctest::Approx(1.0));
  for (double t : linspace(-1.0, 3.0, 21)) {
    const double c = prob.p(t) * wronskian(k, u, v, t) / std::pow(e0(k, t, t0), 2);
    CHECK(c == doctest::Approx(c0).epsilon(1e-7));
  }
}

TEST_CASE("Lagrange identity for smooth fields") {
  auto k = KappaPair::make(Family::time_power, Alpha(0.35), 0.9);
  SelfAdjointProblem prob{k, exp(0.2 * T), sin(T), ScalarField(), 0.5, 3.0};
  const auto x = T * T, y = log(T) + 1.0;
  const auto lhs = x * apply_L(prob, y) - y * apply_L(prob, x);
  const auto pw = prob.p * wronskian_field(k, x, y);
  for (double t : {0.7, 1.5, 2.6}) {
    const double rhs = dalpha(k, pw, t) + k.k1(t) * pw(t);
    CHECK(lhs(t) == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("general equation agrees with its self-adjoint form") {
  auto k = KappaPair::make(Family::trig, Alpha(0.7));
  GeneralProblem gp{k, 1.0 + 0.2 * T * T, sin(T), ScalarField::constant(2.0), exp(-T), 0.0, 3.0};
  const IVPSpec ivp{0.5, 0.3, -1.0};
  const double step = default_step(gp.lo, gp.hi);
  auto direct = solve_general_ivp(gp, ivp, step);
  auto sa = to_self_adjoint(gp, ivp.t0);
  auto conv = solve_ivp(sa, ivp, step);
  for (double t : linspace(0.0, 3.0, 25)) {
    CHECK(std::abs(direct.x_at(t) - conv.x_at(t)) <= 1e-7 * std::max(1.0, std::abs(conv.x_at(t))));
    CHECK(std::abs(direct.dax_at(t) - conv.dax_at(t)) <= 1e-7 * std::max(1.0, std::abs(conv.dax_at(t))));
  }
  // the converted operator is L_general scaled by p / a
  const auto f = cos(T) + T;
  for (double t : {0.4, 2.2}) {
    const double lg = gp.a(t) * dalpha2(k, f, t) + gp.b(t) * dalpha(k, f, t) + gp.c(t) * f(t);
    CHECK(apply_L(sa, f)(t) == doctest::Approx(sa.p(t) / gp.a(t) * lg).epsilon(1e-7));
  }
}

TEST_CASE("input validation") {
  auto k = trig(0.5);
  SelfAdjointProblem bad_p{k, cos(T), ScalarField(), ScalarField(), 0.0, 3.0};
  CHECK_THROWS_AS(solve_ivp(bad_p, {0.0, 1.0, 0.0}, 0.01), DomainError);
  SelfAdjointProblem ok{k, ScalarField::constant(1.0), ScalarField(), ScalarField(), 0.0, 1.0};
  CHECK_THROWS_AS(solve_ivp(ok, {2.0, 1.0, 0.0}, 0.01), DomainError);
  CHECK_THROWS_AS(solve_ivp(ok, {0.0, 1.0, 0.0}, 0.0), InvalidArgument);
  SelfAdjointProblem rev{k, ScalarField::constant(1.0), ScalarField(), ScalarField(), 1.0, 0.0};
  CHECK_THROWS_AS(rev.validate(), InvalidArgument);
  auto tp = KappaPair::make(Family::time_power, Alpha(0.5), 1.0);
  SelfAdjointProblem outside{tp, ScalarField::constant(1.0), ScalarField(), ScalarField(), -1.0, 1.0};
  CHECK_THROWS_AS(outside.validate(), DomainError);
  GeneralProblem sign_change{k, T, ScalarField(), ScalarField(), ScalarField(), -1.0, 1.0};
  CHECK_THROWS_AS(sign_change.validate(), DomainError);
}
