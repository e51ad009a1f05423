#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "conform/confcalc.hpp"
#include "conform/runner.hpp"

using namespace conform;
using json = nlohmann::json;

namespace {

const std::string kRoot = CONFORM_SOURCE_DIR;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string base(const std::string& task, const std::string& extra) {
  return "schema_version = 1\ntask = " + task + "\n" + extra;
}

json report_of(const RunResult& r) {
  REQUIRE_FALSE(r.report.empty());
  return json::parse(r.report);
}

json run_ok(const std::string& text) {
  auto r = run_text(text);
  INFO(r.message);
  REQUIRE(r.exit_code == kExitOk);
  auto j = report_of(r);
  INFO(j.dump(1));
  CHECK(j["status"] == "PASS");
  return j;
}

std::string config_error(const std::string& text) {
  auto r = run_text(text);
  CHECK(r.exit_code == kExitConfig);
  CHECK(r.report.empty());
  CHECK(r.rows.empty());
  return r.message;
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

const std::string kTrig1 = "kappa.family = trig\nkappa.alpha = 1\n";

}  // namespace

TEST_CASE("flat config format") {
  auto c = FlatConfig::parse("# comment\n a.b = 1 + t  # trailing\n\nc=x\r\n");
  CHECK(c.entries().size() == 2);
  CHECK(c.get("a.b") == "1 + t");
  CHECK(c.get("c") == "x");
  CHECK_FALSE(c.find("d"));
  CHECK(FlatConfig::parse(c.to_text()).entries() == c.entries());
  auto line_of = [](const char* text) {
    try {
      FlatConfig::parse(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(contains(line_of("a = 1\nb\n"), "line 2"));
  CHECK(contains(line_of("a = 1\na = 2\n"), "duplicate"));
  CHECK(contains(line_of("a..b = 1\n"), "invalid key"));
  CHECK(contains(line_of("a = \n"), "empty value"));
  CHECK(contains(line_of("x y = 1\n"), "invalid key"));
}

TEST_CASE("config validation") {
  const std::string ok = kTrig1 + "coeff.p = 1\ncoeff.q = 1\ninterval.lo = 0\ninterval.hi = 1\nivp.x0 = 0\nivp.dax0 = 1\n";
  run_ok(base("ivp", ok));
  CHECK(contains(config_error("task = ivp\n" + ok), "schema_version"));
  CHECK(contains(config_error("schema_version = 2\ntask = ivp\n" + ok), "schema_version"));
  CHECK(contains(config_error(base("solve", ok)), "unknown task"));
  CHECK(contains(config_error(base("ivp", ok + "coeff.r = 1\n")), "unknown key 'coeff.r'"));
  CHECK(contains(config_error(base("ivp", ok + "interval.h1_length = 1\n")), "exactly one"));
  CHECK(contains(config_error(base("ivp", ok + "coeff.a = 1\n")), "either"));
  CHECK(contains(config_error(base("ivp", "kappa.family = trig\nkappa.alpha = 1\ncoeff.p = 1\ncoeff.q = 1 + y\n"
                                          "interval.lo = 0\ninterval.hi = 1\nivp.x0 = 0\nivp.dax0 = 1\n")),
                 "coeff.q: unknown identifier 'y' at offset 4"));
  CHECK(contains(config_error(base("ivp", "kappa.family = trig\nkappa.alpha = 1\ncoeff.p = 1 - t\n"
                                          "interval.lo = 0\ninterval.hi = 2\nivp.x0 = 0\nivp.dax0 = 1\n")),
                 "problem"));
  CHECK(contains(config_error(base("ivp", "kappa.family = trig\nkappa.alpha = 1\ncoeff.p = 1/(t-0.5)^0\n"
                                          "coeff.q = log(t - 0.5)\ninterval.lo = 0\ninterval.hi = 1\nivp.x0 = 0\n"
                                          "ivp.dax0 = 1\n")),
                 "not finite"));
  CHECK(contains(config_error(base("ivp", "kappa.family = time_power\nkappa.alpha = 0.5\nkappa.omega = 1\n"
                                          "coeff.p = 1\ninterval.lo = -1\ninterval.hi = 1\nivp.x0 = 0\nivp.dax0 = 1\n")),
                 "problem"));
  CHECK(contains(config_error(base("ivp", "kappa.family = power\nkappa.alpha = 0.5\ncoeff.p = 1\n"
                                          "interval.lo = 0\ninterval.hi = 1\nivp.x0 = 0\nivp.dax0 = 1\n")),
                 "omega"));
  CHECK(contains(config_error(base("ivp", kTrig1 + "coeff.p = 1\ninterval.lo = 0\ninterval.hi = t\nivp.x0 = 0\n"
                                                   "ivp.dax0 = 1\n")),
                 "expected a constant"));
  CHECK(contains(config_error(base("ivp", ok + "ivp.t0 = 3\n")), "outside"));
  CHECK(contains(config_error(base("ivp", ok + "numerics.tol = -1\n")), "positive"));
  CHECK(contains(config_error(base("ivp", ok + "numerics.grid = 1\n")), "integer"));
  CHECK(contains(config_error(base("ivp", ok + "output.csv = ../x.csv\n")), "file names"));
  CHECK(contains(config_error(base("ivp", ok + "symbols.t = 1\n")), "reserved"));
  CHECK(contains(config_error(base("green", ok + "green.method = closed_form\n")), "closed_form"));
  CHECK(contains(config_error(base("green", ok + "bc.kind = periodic\ngreen.method = phipsi\n")), "periodic"));
  CHECK(contains(config_error(base("green", ok + "bc.A = 1\n")), "homogeneous"));
  CHECK(contains(config_error(base("bvp", ok + "bc.kind = focal\nbc.xi = 1\n")), "general"));
  CHECK(contains(config_error(base("bvp", ok + "bc.kind = general\nbc.xi = 0\nbc.beta = 0\nbc.gamma = 1\nbc.delta = 0\n")),
                 "bc"));
  CHECK(contains(config_error(base("flw", ok + "flw.ladder = 0.5, 0.4\n")), "increase"));
  CHECK(contains(config_error(base("disconjugacy", ok + "disconjugacy.criterion = iv\n")), "criterion"));
  CHECK(contains(config_error(base("lyapunov", kTrig1 + "coeff.p = 2\ncoeff.q = 1\ninterval.lo = 0\ninterval.hi = 1\n")),
                 "p must be"));
  CHECK(contains(run_file("/nonexistent/x.conf").message, "cannot read"));
  CHECK(run_text("{ not json").exit_code == kExitConfig);
  CHECK(run_text("{\"task\": \"ivp\"}").exit_code == kExitConfig);
}

TEST_CASE("overrides and provenance") {
  const std::string text = base("ivp", kTrig1 + "coeff.p = 1\ncoeff.q = 1\ninterval.lo = 0\ninterval.hi = 1\n"
                                                "ivp.x0 = 0\nivp.dax0 = 1\nnumerics.agree_tol = 1e-7\n");
  auto rc = load_run_config(FlatConfig::parse(text), {1e-3, 11});
  CHECK(rc.tol.value == 1e-3);
  CHECK(rc.tol.source == Source::cli);
  CHECK(rc.grid == 11);
  CHECK(rc.grid_source == Source::cli);
  CHECK(rc.agree_tol.source == Source::config);
  CHECK(rc.bc_tol.source == Source::default_value);
  CHECK(rc.raw.get("numerics.tol") == "0.001");
  auto r = run(rc);
  CHECK(r.rows.size() == 11);
  auto j = report_of(r);
  CHECK(j["tolerances"]["residual"]["source"] == "cli");
  CHECK(j["tolerances"]["residual"]["value"] == 1e-3);
  CHECK(j["tolerances"]["agreement"]["source"] == "config");
  CHECK(j["tolerances"]["boundary"]["source"] == "default");
  CHECK(j["config"]["numerics.grid"] == "11");
}

TEST_CASE("interval from an alpha length") {
  for (double lo : {0.0, 0.4}) {
    const std::string pair = lo == 0.0 ? "kappa.family = trig\nkappa.alpha = 0.6\n"
                                       : "kappa.family = time_power\nkappa.alpha = 0.5\nkappa.omega = 2\n";
    auto rc = load_run_config(FlatConfig::parse(base(
        "ivp", pair + "coeff.p = 1\ninterval.lo = " + std::to_string(lo) +
                   "\ninterval.h1_length = 1.5\nivp.t0 = 1\nivp.x0 = 0\nivp.dax0 = 1\n")));
    if (lo == 0.0)
      CHECK(rc.problem.hi == doctest::Approx(pi_star(rc.pair, 1.5)).epsilon(1e-14));
    else
      CHECK(h1(rc.pair, rc.problem.hi, lo) == doctest::Approx(1.5).epsilon(1e-12));
  }
}

TEST_CASE("general form coefficients") {
  const std::string common = "kappa.family = trig\nkappa.alpha = 0.6\ninterval.lo = 0\ninterval.hi = 2\nivp.x0 = 1\nivp.dax0 = 0\n";
  auto a = run_text(base("ivp", common + "coeff.a = 2 + t\ncoeff.b = 0.5\ncoeff.c = 1\ncoeff.g = sin(t)\n"));
  REQUIRE(a.exit_code == kExitOk);
  CHECK(report_of(a)["status"] == "PASS");
  auto rc = load_run_config(FlatConfig::parse(base("ivp", common + "coeff.a = 2 + t\ncoeff.b = 0.5\ncoeff.c = 1\ncoeff.g = sin(t)\n")));
  GeneralProblem gp{rc.pair,
                    parse_expression("2 + t").to_field(),
                    ScalarField::constant(0.5),
                    ScalarField::constant(1.0),
                    parse_expression("sin(t)").to_field(),
                    0.0,
                    2.0};
  auto direct = solve_general_ivp(gp, {0.0, 1.0, 0.0}, 0.005);
  for (const auto& row : a.rows) CHECK(row[1] == doctest::Approx(direct.x_at(row[0])).scale(1.0).epsilon(1e-6));
}

TEST_CASE("tasks") {
  SUBCASE("ivp") {
    auto j = run_ok(base("ivp", kTrig1 + "coeff.p = 1\ncoeff.q = 1\ninterval.lo = 0\ninterval.hi = 3\nivp.x0 = 0\n"
                                         "ivp.dax0 = 1\ncheck.exact = sin(t)\n"));
    CHECK(j["residuals"]["exact"].get<double>() <= 1e-6);
    CHECK(j["verdicts"]["initial"] == true);
  }
  SUBCASE("bvp") {
    auto j = run_ok(base("bvp", kTrig1 + "coeff.p = 1\ncoeff.h = 1\ninterval.lo = 0\ninterval.hi = 1\n"
                                         "check.exact = (t^2 - t)/2\n"));
    CHECK(j["verdicts"]["boundary"] == true);
    CHECK(j["findings"]["determinant"].get<double>() == doctest::Approx(1.0).epsilon(1e-8));
  }
  SUBCASE("green kernels") {
    for (const char* m : {"phipsi", "cauchy", "closed_form"}) {
      auto j = run_ok(base("green", kTrig1 + "coeff.p = 1\ncoeff.h = 1\ninterval.lo = 0\ninterval.hi = 1\n"
                                             "check.exact = (t^2 - t)/2\ngreen.method = " + m + "\n"));
      CHECK(j["verdicts"]["negativity"] == true);
      CHECK(j["verdicts"]["comparison"] == true);
      CHECK(j["parameters"]["method"] == m);
    }
    auto f = run_ok(base("green", "kappa.family = power\nkappa.alpha = 0.6\nkappa.omega = 1.5\ncoeff.p = 1 + t\n"
                                  "coeff.q = 0.5\ncoeff.h = cos(t)\ninterval.lo = 0\ninterval.hi = 2\nbc.kind = focal\n"));
    CHECK_FALSE(f["verdicts"].contains("negativity"));
  }
  SUBCASE("cauchy") {
    auto j = run_ok(base("cauchy", kTrig1 + "coeff.p = 1\ncoeff.q = 1\ninterval.lo = 0\ninterval.hi = 3\n"
                                            "cauchy.s = 0.5\ncheck.exact = sin(t - 0.5)\n"));
    CHECK(j["residuals"]["agreement"].get<double>() <= 1e-6);
  }
  SUBCASE("riccati") {
    auto j = run_ok(base("riccati", kTrig1 + "coeff.p = 1\ncoeff.q = 1\ninterval.lo = 0\ninterval.hi = 1.2\n"
                                             "ivp.x0 = 1\nivp.dax0 = 0\n"));
    CHECK(j["findings"]["nonvanishing"] == true);
    CHECK(j["verdicts"]["roundtrip"] == true);
    auto v = run_ok(base("riccati", kTrig1 + "coeff.p = 1\ncoeff.q = 1\ninterval.lo = 0\ninterval.hi = 3\n"
                                             "ivp.x0 = 1\nivp.dax0 = 0\n"));
    CHECK(v["findings"]["nonvanishing"] == false);
    CHECK(v["findings"]["zeros"][0].get<double>() == doctest::Approx(M_PI / 2).epsilon(1e-8));
  }
  SUBCASE("lyapunov") {
    auto two = run_ok(base("lyapunov", kTrig1 + "coeff.p = 1\ncoeff.q = 1\ninterval.lo = 0\ninterval.hi = 4\n"));
    CHECK(two["findings"]["disconjugate"] == false);
    CHECK(two["verdicts"]["necessary"] == true);
    CHECK(two["findings"]["rhs"].get<double>() == doctest::Approx(1.0).epsilon(1e-10));
    auto weak = run_ok(base("lyapunov", kTrig1 + "coeff.p = 1\ncoeff.q = 0.1\ninterval.lo = 0\ninterval.hi = 2\n"));
    CHECK(weak["verdicts"]["sufficient"] == true);
    CHECK(config_error(base("lyapunov", kTrig1 + "coeff.p = 1\ncoeff.q = sin(t)\ninterval.lo = 0\ninterval.hi = 4\n"))
              .find("positive") != std::string::npos);
  }
  SUBCASE("disconjugacy") {
    auto yes = run_ok(base("disconjugacy", kTrig1 + "coeff.p = 1\ncoeff.q = 1\ninterval.lo = 0\ninterval.hi = 3\n"));
    CHECK(yes["findings"]["disconjugate"] == true);
    auto no = run_ok(base("disconjugacy", kTrig1 + "coeff.p = 1\ncoeff.q = 1\ninterval.lo = 0\ninterval.hi = 4\n"
                                                   "disconjugacy.criterion = vi\n"));
    CHECK(no["findings"]["disconjugate"] == false);
  }
  SUBCASE("roundabout") {
    for (const char* hi : {"3", "4"}) {
      auto j = run_ok(base("roundabout", kTrig1 + "coeff.p = 1\ncoeff.q = 1\ninterval.lo = 0\ninterval.hi = " + hi + "\n"));
      CHECK(j["verdicts"]["all_agree"] == true);
      CHECK(j["findings"]["disconjugate"] == (std::string(hi) == "3"));
    }
  }
  SUBCASE("flw") {
    auto j = run_ok(base("flw", kTrig1 + "coeff.p = 1\ncoeff.q = 1\ninterval.lo = 0\ninterval.hi = 40\n"
                                         "flw.ladder = 5, 10, 20, 40\n"));
    CHECK(j["findings"]["oscillation_predicted"] == true);
    CHECK(j["findings"]["zeros"].size() >= 12);
  }
  SUBCASE("audit") {
    auto j = run_ok(base("audit", "kappa.family = time_power\nkappa.alpha = 0.7\nkappa.omega = 1\ncoeff.p = 1 + t\n"
                                  "coeff.q = 0.5*sin(t)\ninterval.lo = 0.5\ninterval.hi = 3\n"));
    CHECK(j["verdicts"]["abel"] == true);
    CHECK(j["verdicts"]["cauchy_agreement"] == true);
    CHECK(j["verdicts"]["green_symmetry"] == true);
  }
}

TEST_CASE("exit codes") {
  auto r = run_file(kRoot + "/tests/data/neumann_degenerate.conf");
  CHECK(r.exit_code == kExitDegenerate);
  CHECK(contains(r.message, "det"));
  CHECK(r.rows.empty());
  auto j = report_of(r);
  CHECK(j["status"] == "DEGENERATE");
  CHECK(std::abs(j["findings"]["determinant"].get<double>()) <= 1e-12);
  CHECK(j["exit_code"] == 2);

  auto n = run_text(base("green", kTrig1 + "coeff.p = 1\ncoeff.q = 1\ncoeff.h = 1\ninterval.lo = 0\n"
                                           "interval.hi = pi\n"));
  CHECK(n.exit_code == kExitDegenerate);

  auto m = run_text(base("ivp", kTrig1 + "coeff.p = 1\ncoeff.q = -1e6*exp(t)\ninterval.lo = 0\ninterval.hi = 1\n"
                                         "ivp.x0 = 1\nivp.dax0 = 0\n"));
  CHECK(m.exit_code == kExitNumerics);
  CHECK(report_of(m)["status"] == "NUMERICS_ERROR");
}

TEST_CASE("report round trip") {
  auto first = run_file(kRoot + "/tests/data/periodic_trig.conf");
  REQUIRE(first.exit_code == kExitOk);
  auto again = run_text(first.report);
  REQUIRE(again.exit_code == kExitOk);
  REQUIRE(again.rows.size() == first.rows.size());
  bool identical = true;
  for (std::size_t i = 0; i < first.rows.size(); ++i)
    for (int c = 0; c < 4; ++c)
      identical = identical && std::memcmp(&first.rows[i][c], &again.rows[i][c], sizeof(double)) == 0;
  CHECK(identical);
  auto a = json::parse(first.report), b = json::parse(again.report);
  a.erase("wall_time_s");
  b.erase("wall_time_s");
  CHECK(a == b);
}

TEST_CASE("periodic example golden files") {
  auto r = run_file(kRoot + "/tests/data/periodic_trig.conf");
  REQUIRE(r.exit_code == kExitOk);
  CHECK(r.csv_name == "periodic.csv");
  CHECK(format_csv(r.rows) == slurp(kRoot + "/tests/golden/periodic.csv"));
  auto got = json::parse(r.report), want = json::parse(slurp(kRoot + "/tests/golden/periodic.json"));
  CHECK(got["status"] == "PASS");
  got.erase("wall_time_s");
  want.erase("wall_time_s");
  CHECK(got == want);
  const auto& rows = r.rows;
  const double k0 = std::sin(M_PI / 4), k1 = std::cos(M_PI / 4);
  double err = 0;
  for (const auto& row : rows) err = std::max(err, std::abs(row[1] + std::exp(-k1 / k0 * row[0]) * std::sin(2 * row[0] / k0)));
  CHECK(err <= 1e-4);

  auto dir = std::filesystem::temp_directory_path() / "conform_runner_test";
  std::filesystem::remove_all(dir);
  write_outputs(r, dir.string());
  CHECK(slurp((dir / "periodic.csv").string()) == format_csv(rows));
  CHECK(slurp((dir / "periodic.json").string()) == r.report);
  const auto csv = slurp((dir / "periodic.csv").string());
  CHECK(csv.rfind("t,x,dax,residual\n", 0) == 0);
  CHECK(csv.find('\r') == std::string::npos);
  std::filesystem::remove_all(dir);
}
