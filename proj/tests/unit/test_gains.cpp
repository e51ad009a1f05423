#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "conform/errors.hpp"
#include "conform/gains.hpp"
#include "conform/grid.hpp"

using namespace conform;

TEST_CASE("trig pair closed forms") {
  auto k = KappaPair::make(Family::trig, Alpha(0.5));
  CHECK(k.k1(3.0) == doctest::Approx(0.7071067811865476).epsilon(1e-15));
  CHECK(k.k0(3.0) == doctest::Approx(0.7071067811865476).epsilon(1e-15));
  CHECK(k.family() == Family::trig);
  for (double a : {0.1, 0.3, 0.77, 1.0}) {
    auto p = KappaPair::make(Family::trig, Alpha(a));
    CHECK(std::abs(p.k0(0.0) * p.k0(0.0) + p.k1(0.0) * p.k1(0.0) - 1.0) <= 1e-12);
  }
}

TEST_CASE("power pair collapses to the classical derivative at alpha = 1") {
  auto k = KappaPair::make(Family::power, Alpha(1.0), 3.0);
  CHECK(k.k1(-2.0) == 0.0);
  CHECK(k.k0(-2.0) == 1.0);
  for (double a : {0.2, 0.5, 0.9}) {
    const double w = 2.7;
    auto p = KappaPair::make(Family::power, Alpha(a), w);
    CHECK(std::abs(p.k1(1.0) * p.k0(1.0) - a * (1 - a) * w) <= 1e-12);
  }
}

TEST_CASE("time_power pair") {
  auto k = KappaPair::make(Family::time_power, Alpha(0.5), 1.0);
  CHECK(k.k1(4.0) == doctest::Approx(1.0));
  CHECK(k.k0(4.0) == doctest::Approx(1.0));
  CHECK_FALSE(k.domain().contains(0.0));
  CHECK_THROWS_AS(validate(k, {0.0, 1.0}), DomainError);
}

TEST_CASE("construction errors") {
  CHECK_THROWS_AS(Alpha(0.0), InvalidArgument);
  CHECK_THROWS_AS(Alpha(1.5), InvalidArgument);
  CHECK_THROWS_AS(KappaPair::make(Family::power, Alpha(0.5)), InvalidArgument);
  CHECK_THROWS_AS(KappaPair::make(Family::trig, Alpha(0.5), 2.0), InvalidArgument);
  CHECK_THROWS_AS(KappaPair::make(Family::time_power, Alpha(0.5), -1.0), InvalidArgument);
  CHECK_THROWS_AS(validate(KappaPair::make(Family::trig, Alpha(0.5)), {}), InvalidArgument);
}

TEST_CASE("validation confirms the alpha limits of built-in families") {
  const auto grid = linspace(0.5, 4.0, 9);
  for (auto [fam, w] : {std::pair{Family::trig, 0.0}, {Family::power, 3.0}, {Family::time_power, 2.0}}) {
    auto k = fam == Family::trig ? KappaPair::make(fam, Alpha(0.4)) : KappaPair::make(fam, Alpha(0.4), w);
    auto r = validate(k, grid);
    CHECK(r.limits_checked);
    CHECK(r.violations.empty());
    CHECK(r.ok());
    for (const auto& s : r.limits) {
      if (s.alpha > 0.5) {
        CHECK(std::abs(s.kappa1) < 1e-5 * std::max(1.0, w * s.t));
        CHECK(std::abs(s.kappa0 - 1) < 1e-5 * std::max(1.0, w * s.t));
      }
    }
  }
  auto near_one = KappaPair::make(Family::trig, Alpha(1 - 1e-6));
  CHECK(near_one.k1(0.0) < 1e-5);
  CHECK(std::abs(near_one.k0(0.0) - 1) < 1e-5);
}

TEST_CASE("custom pairs carry the caveat and report violations") {
  const auto t = ScalarField::identity();
  auto k = KappaPair::custom(Alpha(0.5), t - 0.5, ScalarField::constant(0.3), {-1.0, 2.0});
  auto r = validate(k, {0.2, 0.5, 1.0});
  CHECK(r.custom_caveat);
  CHECK_FALSE(r.limits_checked);
  REQUIRE(r.violations.size() == 2);
  CHECK(r.violations[1].t == 0.5);
}
