#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "conform/expr.hpp"

using namespace conform;

namespace {

std::size_t offset_of(const std::string& text) {
  try {
    parse_expression(text);
  } catch (const ParseError& e) {
    return e.offset();
  }
  FAIL("no ParseError for " << text);
  return 0;
}

}  // namespace

TEST_CASE("evaluation") {
  auto one = parse_expression("1").to_field();
  CHECK(one.constant_value() == 1.0);
  CHECK(one.derivative_at(3.0) == 0.0);
  auto pyth = parse_expression("sin(t)^2 + cos(t)^2");
  for (double t : {-2.0, 0.0, 0.7, 5.0}) CHECK(pyth(t) == doctest::Approx(1.0).epsilon(1e-15));
  auto f = parse_expression("t^2/(1+t)").to_field();
  CHECK(f(1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(f.has_closed_derivative());
  CHECK(f.derivative_at(1.0) == doctest::Approx(0.75).epsilon(1e-15));

  CHECK(parse_expression("2^3^2")(0.0) == 512.0);
  CHECK(parse_expression("-t^2")(3.0) == -9.0);
  CHECK(parse_expression("(-t)^2")(3.0) == 9.0);
  CHECK(parse_expression("2*-t")(3.0) == -6.0);
  CHECK(parse_expression("t^-1")(4.0) == 0.25);
  CHECK(parse_expression("8/2/2")(0.0) == 2.0);
  CHECK(parse_expression("1-2-3")(0.0) == -4.0);
  CHECK(parse_expression("  pow( t , 2 )  ")(3.0) == 9.0);
  CHECK(parse_expression("pi")(0.0) == std::numbers::pi);
  CHECK(parse_expression(".5e1")(0.0) == 5.0);
  CHECK(parse_expression("w*t", {{"w", 2.0}})(3.0) == 6.0);
  CHECK(parse_expression("2*pi").is_constant());
  CHECK_FALSE(parse_expression("0*t + t").is_constant());
  CHECK(parse_expression("0*t").constant_value() == 0.0);
}

TEST_CASE("errors carry byte offsets") {
  CHECK(offset_of("") == 0);
  CHECK(offset_of("   ") == 3);
  CHECK(offset_of("1 +") == 3);
  CHECK(offset_of("1 + * 2") == 4);
  CHECK(offset_of("sin(t") == 5);
  CHECK(offset_of("t)") == 1);
  CHECK(offset_of("2 t") == 2);
  CHECK(offset_of("x + 1") == 0);
  CHECK(offset_of("1 + foo(t)") == 4);
  CHECK(offset_of("pow(t)") == 5);
  CHECK(offset_of("t $ 2") == 2);
  CHECK(offset_of("1e999") == 0);
  CHECK(offset_of("+t") == 0);
  CHECK(offset_of("sin t") == 0);
  try {
    parse_expression("q + 1");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("unknown identifier 'q'") != std::string::npos);
  }
}

TEST_CASE("symbolic derivatives") {
  const char* exprs[] = {"sin(2*t)", "cos(t^2)",   "tan(t/3)",       "exp(-t)*t", "log(1+t)",    "sqrt(1+t^2)",
                         "sinh(t)",  "cosh(2*t)",  "t^t",            "2^t",       "pow(t, 2.5)", "1/(1+t)",
                         "-t^3",     "(t-1)/(t+1)", "exp(sin(t))^2", "t*log(t)"};
  for (const char* s : exprs) {
    auto f = parse_expression(s).to_field();
    REQUIRE(f.has_closed_derivative());
    for (double t : {0.3, 1.1, 2.4}) {
      const double fd = numeric_derivative([&](double x) { return f(x); }, t);
      CHECK(f.derivative_at(t) == doctest::Approx(fd).epsilon(1e-8));
    }
    auto g = f.derivative();
    CHECK(g.has_closed_derivative());
  }
  auto a = parse_expression("abs(t - 1)").to_field();
  CHECK_FALSE(a.has_closed_derivative());
  CHECK(a.derivative_at(2.0) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(a.derivative_at(0.0) == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK(parse_expression("abs(-2)").to_field().derivative_at(1.0) == 0.0);
}

TEST_CASE("reference interpreter golden file") {
  std::ifstream in(CONFORM_SOURCE_DIR "/tests/golden/expressions.tsv");
  REQUIRE(in);
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string text, ts, vs, ds;
    std::getline(ss, text, '\t');
    std::getline(ss, ts, '\t');
    std::getline(ss, vs, '\t');
    std::getline(ss, ds, '\t');
    const double t = std::stod(ts), v = std::stod(vs), d = std::stod(ds);
    auto f = parse_expression(text).to_field();
    INFO(text << " at t = " << t);
    CHECK(std::abs(f(t) - v) <= 1e-13 * std::max(1.0, std::abs(v)));
    const double tol = f.has_closed_derivative() ? 1e-11 : 1e-7;
    CHECK(std::abs(f.derivative_at(t) - d) <= tol * std::max(1.0, std::abs(d)));
    ++rows;
  }
  CHECK(rows == 1000);
}
