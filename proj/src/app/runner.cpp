#include "conform/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "conform/confcalc.hpp"
#include "conform/grid.hpp"

namespace conform {

namespace {

using json = nlohmann::json;

constexpr double kAbelTol = 1e-5;
constexpr double kLyapunovSlack = 1e-6;

struct Report {
  json verdicts = json::object();
  json residuals = json::object();
  json findings = json::object();
  std::vector<std::array<double, 4>> rows;
  std::vector<std::string> notes;

  void check(const std::string& name, double value, double tol) {
    residuals[name] = value;
    verdicts[name] = value <= tol;
  }
};

SelfAdjointProblem homogeneous(const SelfAdjointProblem& p) {
  SelfAdjointProblem h = p;
  h.h = ScalarField();
  return h;
}

std::vector<std::array<double, 4>> rows_of(const Trajectory& x, const ScalarField& res, const std::vector<double>& g) {
  std::vector<std::array<double, 4>> rows;
  rows.reserve(g.size());
  for (double t : g) rows.push_back({t, x.x_at(t), x.dax_at(t), res(t)});
  return rows;
}

double sup_col(const std::vector<std::array<double, 4>>& rows, int c) {
  double m = 0;
  for (const auto& r : rows) m = std::max(m, std::abs(r[c]));
  return m;
}

void check_exact(const RunConfig& rc, Report& rep) {
  if (!rc.exact) return;
  double m = 0;
  for (const auto& r : rep.rows) m = std::max(m, std::abs(r[1] - (*rc.exact)(r[0])));
  rep.check("exact", m, rc.exact_tol.value);
}

// Boundary functionals minus their targets.
std::pair<double, double> bc_defects(const BVPSpec& s, const KappaPair& pair, const Trajectory& x, double a,
                                     double b, const QuadratureConfig& quad) {
  if (s.kind == BVPKind::periodic) {
    const double E = e0(pair, a, b, quad);
    return {x.x_at(a) - E * x.x_at(b) - s.A, x.dax_at(a) - E * x.dax_at(b) - s.B};
  }
  return {s.xi * x.x_at(a) - s.beta * x.dax_at(a) - s.A, s.gamma * x.x_at(b) + s.delta * x.dax_at(b) - s.B};
}

Trajectory principal(const RunConfig& rc) {
  const auto& P = rc.problem;
  return solve_ivp(homogeneous(P), {P.lo, 0.0, 1.0 / P.p(P.lo)}, rc.step);
}

void task_ivp(const RunConfig& rc, Report& rep, const std::vector<double>& g) {
  auto x = solve_ivp(rc.problem, rc.ivp, rc.step);
  rep.rows = rows_of(x, lx_residual(rc.problem, x), g);
  rep.check("residual", sup_col(rep.rows, 3), rc.tol.value);
  const double d0 = std::abs(x.x_at(rc.ivp.t0) - rc.ivp.x0) + std::abs(x.dax_at(rc.ivp.t0) - rc.ivp.x1);
  rep.check("initial", d0, rc.bc_tol.value);
  check_exact(rc, rep);
}

void task_bvp(const RunConfig& rc, Report& rep, const std::vector<double>& g) {
  const auto& P = rc.problem;
  const auto bm = boundary_matrix(P, rc.bc, P.lo, P.hi, rc.step);
  rep.findings["determinant"] = bm.det;
  if (bm.closed_form_det) rep.findings["closed_form_determinant"] = *bm.closed_form_det;
  auto x = solve_bvp(P, rc.bc, P.lo, P.hi, rc.step);
  rep.rows = rows_of(x, lx_residual(P, x), g);
  rep.check("residual", sup_col(rep.rows, 3), rc.tol.value);
  auto [r1, r2] = bc_defects(rc.bc, P.pair, x, P.lo, P.hi, rc.quad);
  rep.check("boundary", std::max(std::abs(r1), std::abs(r2)), rc.bc_tol.value);
  check_exact(rc, rep);
}

void task_green(const RunConfig& rc, Report& rep, const std::vector<double>& g) {
  const auto& P = rc.problem;
  const auto kg = linspace(P.lo, P.hi, rc.kernel_grid);
  auto G = [&] {
    switch (rc.green_method) {
      case GreenMethod::phipsi: return green_phipsi(P, rc.bc, P.lo, P.hi, kg, rc.step);
      case GreenMethod::cauchy: return green_cauchy(P, rc.bc, P.lo, P.hi, kg, rc.step);
      case GreenMethod::periodic: return green_periodic(P, P.lo, P.hi, kg, rc.step);
      case GreenMethod::closed_form: return green_closed_form(P.pair, P.p, P.lo, P.hi, rc.bc.kind, kg, rc.quad);
    }
    throw InvalidArgument("green: unknown method");
  }();
  auto x = apply_green(G, P.pair, P.h, rc.quad, g);
  rep.rows = rows_of(x, lx_residual(P, x), g);
  rep.check("residual", sup_col(rep.rows, 3), rc.tol.value);
  auto [r1, r2] = bc_defects(rc.bc, P.pair, x, P.lo, P.hi, rc.quad);
  rep.check("boundary", std::max(std::abs(r1), std::abs(r2)), rc.agree_tol.value);

  const auto audit = audit_green(G, P);
  rep.check("symmetry", audit.symmetry_residual, rc.agree_tol.value);
  rep.check("continuity", audit.continuity_defect, rc.agree_tol.value);
  rep.findings["max_interior"] = audit.max_interior;
  rep.findings["negativity_applicable"] = audit.negativity_applicable;
  if (audit.negativity_applicable) rep.verdicts["negativity"] = audit.negative;
  if (audit.comparison_applicable) {
    rep.verdicts["comparison"] = audit.comparison_holds;
    rep.findings["comparison_min"] = audit.comparison_min;
  }
  if (!audit.note.empty()) rep.notes.push_back(audit.note);
  check_exact(rc, rep);
}

void task_cauchy(const RunConfig& rc, Report& rep, const std::vector<double>& g) {
  const auto& P = rc.problem;
  const auto H = homogeneous(P);
  const auto kg = linspace(P.lo, P.hi, rc.kernel_grid);
  auto K1 = cauchy_kernel(H, CauchyMethod::ivp_sweep, kg, rc.step);
  auto K2 = cauchy_kernel(H, CauchyMethod::basis_formula, kg, rc.step);
  double gap = 0;
  for (std::size_t i = 0; i < kg.size(); ++i)
    for (std::size_t j = 0; j < kg.size(); ++j) gap = std::max(gap, std::abs(K1.value(i, j) - K2.value(i, j)));
  rep.check("agreement", gap, rc.agree_tol.value);

  const double s = rc.cauchy_s;
  std::vector<double> xv, dv;
  for (double t : g) {
    auto k = K1(t, s);
    xv.push_back(k.value);
    dv.push_back(k.dax);
  }
  Trajectory col(g, xv, dv);
  rep.rows = rows_of(col, lx_residual(H, col), g);
  rep.check("residual", sup_col(rep.rows, 3), rc.tol.value);
  auto at = K1(s, s);
  rep.check("initial", std::abs(at.value) + std::abs(at.dax - 1.0 / P.p(s)), rc.agree_tol.value);
  check_exact(rc, rep);
}

void task_riccati(const RunConfig& rc, Report& rep, const std::vector<double>& g) {
  const auto H = homogeneous(rc.problem);
  if (!rc.problem.h.is_zero()) rep.notes.push_back("h ignored: the Riccati correspondence concerns L x = 0");
  auto x = solve_ivp(H, rc.ivp, rc.step);
  double lo = INFINITY, hi = 0;
  for (double v : x.x()) {
    lo = std::min(lo, std::abs(v));
    hi = std::max(hi, std::abs(v));
  }
  const auto zeros = find_zeros(x);
  const bool nonvanishing = zeros.empty() && hi > 0 && lo > 1e-8 * hi;
  rep.findings["nonvanishing"] = nonvanishing;
  rep.findings["zeros"] = zeros;
  if (!nonvanishing) {
    rep.notes.push_back("x vanishes; residual column holds L x");
    rep.rows = rows_of(x, lx_residual(H, x), g);
    rep.check("residual", sup_col(rep.rows, 3), rc.tol.value);
    return;
  }
  auto z = riccati_from_solution(H, x);
  auto rp = riccati_problem(H);
  rep.rows = rows_of(x, riccati_residual(rp, z), g);
  rep.check("riccati", sup_col(rep.rows, 3), rc.tol.value);
  auto y = solution_from_riccati(rp, z, rc.ivp.t0, rc.step);
  const double x0 = x.x_at(rc.ivp.t0);
  double gap = 0;
  for (double t : g) gap = std::max(gap, std::abs(x0 * y.x_at(t) - x.x_at(t)));
  rep.check("roundtrip", gap / hi, rc.agree_tol.value);
  check_exact(rc, rep);
}

void task_lyapunov(const RunConfig& rc, Report& rep, const std::vector<double>& g) {
  const auto& P = rc.problem;
  auto L = lyapunov_check(P, P.lo, P.hi, rc.quad, kLyapunovSlack);
  rep.findings["lhs"] = L.lhs;
  rep.findings["rhs"] = L.rhs;
  rep.findings["necessary_holds"] = L.necessary_holds;
  rep.findings["sufficient_disconjugacy"] = L.sufficient_disconjugacy;
  auto u = principal(rc);
  rep.rows = rows_of(u, lx_residual(homogeneous(P), u), g);
  rep.check("residual", sup_col(rep.rows, 3), rc.tol.value);
  auto dv = disconjugate(P, P.lo, P.hi, ReidCriterion::reid_v, rc.step);
  rep.findings["disconjugate"] = dv.disconjugate;
  // Two zeros force the inequality; its failure forces disconjugacy.
  if (!dv.disconjugate) rep.verdicts["necessary"] = L.necessary_holds;
  if (L.sufficient_disconjugacy) rep.verdicts["sufficient"] = dv.disconjugate;
}

void task_disconjugacy(const RunConfig& rc, Report& rep, const std::vector<double>& g) {
  const auto& P = rc.problem;
  auto d = disconjugate(P, P.lo, P.hi, rc.criterion, rc.step);
  rep.findings["disconjugate"] = d.disconjugate;
  rep.findings["zeros"] = d.zeros;
  rep.findings["min_ratio"] = d.min_ratio;
  auto u = principal(rc);
  rep.rows = rows_of(u, lx_residual(homogeneous(P), u), g);
  rep.check("residual", sup_col(rep.rows, 3), rc.tol.value);
}

void task_roundabout(const RunConfig& rc, Report& rep, const std::vector<double>& g) {
  const auto& P = rc.problem;
  auto R = roundabout_audit(P, P.lo, P.hi, rc.step);
  const char* names[] = {"i", "ii", "iii", "iv", "v", "vi"};
  json crit = json::object();
  for (int i = 0; i < 6; ++i) crit[names[i]] = R.criteria[i];
  rep.findings["criteria"] = crit;
  rep.findings["disconjugate"] = R.criteria[4];
  rep.findings["functional"] = R.functional;
  rep.findings["max_fan_zeros"] = R.max_fan_zeros;
  rep.findings["best_angle"] = R.best_angle;
  rep.verdicts["all_agree"] = R.all_agree;
  if (!R.note.empty()) rep.notes.push_back(R.note);
  auto u = principal(rc);
  rep.rows = rows_of(u, lx_residual(homogeneous(P), u), g);
  rep.check("residual", sup_col(rep.rows, 3), rc.tol.value);
}

void task_flw(const RunConfig& rc, Report& rep, const std::vector<double>& g) {
  const auto& P = rc.problem;
  auto F = flw_scan(P, P.lo, rc.ladder, rc.step);
  rep.findings["ladder"] = F.ladder;
  rep.findings["weight_integral"] = F.weight_integral;
  rep.findings["q_integral"] = F.q_integral;
  rep.findings["weight_slope"] = F.weight_slope;
  rep.findings["q_slope"] = F.q_slope;
  rep.findings["oscillation_predicted"] = F.oscillation_predicted;
  rep.findings["zeros"] = F.zeros;
  if (!F.note.empty()) rep.notes.push_back(F.note);
  auto u = principal(rc);
  rep.rows = rows_of(u, lx_residual(homogeneous(P), u), g);
  rep.check("residual", sup_col(rep.rows, 3), rc.tol.value);
}

void task_audit(const RunConfig& rc, Report& rep, const std::vector<double>& g) {
  const auto& P = rc.problem;
  const auto H = homogeneous(P);
  auto [x1, x2] = basis(H, P.lo, rc.step);
  rep.rows = rows_of(x1, lx_residual(H, x1), g);
  double res = sup_col(rep.rows, 3);
  for (double t : g) res = std::max(res, std::abs(lx_residual(H, x2)(t)));
  rep.check("residual", res, rc.tol.value);

  double lo = INFINITY, hi = -INFINITY;
  for (double t : g) {
    const double c = P.p(t) * wronskian(P.pair, x1, x2, t) / std::pow(e0(P.pair, t, P.hi, rc.quad), 2);
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  rep.check("abel", (hi - lo) / std::max(std::abs(hi), std::abs(lo)), kAbelTol);

  const auto kg = linspace(P.lo, P.hi, rc.kernel_grid);
  auto K1 = cauchy_kernel(H, CauchyMethod::ivp_sweep, kg, rc.step);
  auto K2 = cauchy_kernel(H, CauchyMethod::basis_formula, kg, rc.step);
  double gap = 0;
  for (std::size_t i = 0; i < kg.size(); ++i)
    for (std::size_t j = 0; j < kg.size(); ++j) gap = std::max(gap, std::abs(K1.value(i, j) - K2.value(i, j)));
  rep.check("cauchy_agreement", gap, rc.agree_tol.value);

  try {
    auto G = green_phipsi(P, BVPSpec::conjugate(), P.lo, P.hi, kg, rc.step);
    auto A = audit_green(G, P);
    rep.check("green_symmetry", A.symmetry_residual, rc.agree_tol.value);
    if (A.negativity_applicable) rep.verdicts["green_negativity"] = A.negative;
  } catch (const DegenerateProblem& e) {
    rep.findings["conjugate_degenerate"] = true;
    rep.notes.push_back(e.what());
  }
  auto d = disconjugate(P, P.lo, P.hi, ReidCriterion::reid_v, rc.step);
  rep.findings["disconjugate"] = d.disconjugate;
}

json tolerance(const Setting& s) { return {{"value", s.value}, {"source", to_string(s.source)}}; }

json parameters(const RunConfig& rc) {
  const auto& P = rc.problem;
  json p;
  p["family"] = std::string(to_string(rc.pair.family()));
  p["alpha"] = rc.pair.alpha();
  p["omega"] = rc.pair.omega() ? json(*rc.pair.omega()) : json(nullptr);
  p["interval"] = {P.lo, P.hi};
  p["coefficients"] = rc.coefficient_text;
  p["grid"] = rc.grid;
  p["kernel_grid"] = rc.kernel_grid;
  p["step"] = rc.step;
  if (rc.task == Task::bvp || rc.task == Task::green) {
    p["bc"] = {{"kind", to_string(rc.bc.kind)}, {"xi", rc.bc.xi},       {"beta", rc.bc.beta},
               {"gamma", rc.bc.gamma},          {"delta", rc.bc.delta}, {"A", rc.bc.A},
               {"B", rc.bc.B}};
  }
  if (rc.task == Task::green) p["method"] = to_string(rc.green_method);
  if (rc.task == Task::ivp || rc.task == Task::riccati) p["ivp"] = {{"t0", rc.ivp.t0}, {"x0", rc.ivp.x0}, {"dax0", rc.ivp.x1}};
  if (rc.task == Task::cauchy) p["s"] = rc.cauchy_s;
  return p;
}

int exit_code_of(const std::exception_ptr& e, std::string& msg, json& extra) {
  try {
    std::rethrow_exception(e);
  } catch (const DegenerateProblem& d) {
    msg = d.what();
    extra["determinant"] = d.determinant();
    return kExitDegenerate;
  } catch (const NumericsError& n) {
    msg = n.what();
    return kExitNumerics;
  } catch (const ConfigError& c) {
    msg = c.what();
    return kExitConfig;
  } catch (const ParseError& p) {
    msg = p.what();
    return kExitConfig;
  } catch (const InvalidArgument& i) {
    msg = i.what();
    return kExitConfig;
  } catch (const DomainError& d) {
    msg = d.what();
    return kExitConfig;
  } catch (const std::exception& x) {
    msg = x.what();
    return kExitNumerics;
  }
}

}  // namespace

RunResult run(const RunConfig& rc) {
  RunResult out;
  out.csv_name = rc.csv_name;
  out.json_name = rc.json_name;
  const auto t0 = std::chrono::steady_clock::now();
  const auto& P = rc.problem;
  const auto g = linspace(P.lo, P.hi, rc.grid);

  Report rep;
  json extra = json::object();
  try {
    switch (rc.task) {
      case Task::ivp: task_ivp(rc, rep, g); break;
      case Task::bvp: task_bvp(rc, rep, g); break;
      case Task::green: task_green(rc, rep, g); break;
      case Task::cauchy: task_cauchy(rc, rep, g); break;
      case Task::riccati: task_riccati(rc, rep, g); break;
      case Task::lyapunov: task_lyapunov(rc, rep, g); break;
      case Task::disconjugacy: task_disconjugacy(rc, rep, g); break;
      case Task::roundabout: task_roundabout(rc, rep, g); break;
      case Task::flw: task_flw(rc, rep, g); break;
      case Task::audit: task_audit(rc, rep, g); break;
    }
  } catch (...) {
    out.exit_code = exit_code_of(std::current_exception(), out.message, extra);
    if (out.exit_code == kExitConfig) return out;
    rep.rows.clear();
  }

  json j;
  j["task"] = to_string(rc.task);
  j["config"] = rc.raw.entries();
  j["parameters"] = parameters(rc);
  j["verdicts"] = rep.verdicts;
  j["residuals"] = rep.residuals;
  j["findings"] = rep.findings;
  for (auto& [k, v] : extra.items()) j["findings"][k] = v;
  j["tolerances"] = {{"residual", tolerance(rc.tol)},
                     {"boundary", tolerance(rc.bc_tol)},
                     {"agreement", tolerance(rc.agree_tol)},
                     {"exact", tolerance(rc.exact_tol)},
                     {"abel", {{"value", kAbelTol}, {"source", "default"}}},
                     {"lyapunov_slack", {{"value", kLyapunovSlack}, {"source", "default"}}},
                     {"quadrature", {{"abs", rc.quad.abs_tol}, {"rel", rc.quad.rel_tol}}}};
  j["notes"] = rep.notes;
  j["exit_code"] = out.exit_code;
  if (out.exit_code == kExitOk) {
    bool all = true;
    for (auto& [k, v] : rep.verdicts.items()) all = all && v.get<bool>();
    j["status"] = all ? "PASS" : "FAIL";
  } else {
    j["status"] = out.exit_code == kExitDegenerate ? "DEGENERATE" : "NUMERICS_ERROR";
    j["message"] = out.message;
  }
  j["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.rows = std::move(rep.rows);
  out.report = j.dump(2) + "\n";
  return out;
}

RunResult run_text(std::string_view text, const Overrides& ov) {
  RunResult out;
  try {
    FlatConfig raw;
    auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string_view::npos && text[first] == '{') {
      json j = json::parse(text);
      if (!j.contains("config") || !j["config"].is_object()) throw ConfigError("report has no config object");
      std::map<std::string, std::string> m;
      for (auto& [k, v] : j["config"].items()) {
        if (!v.is_string()) throw ConfigError("report config: value of '" + k + "' is not a string");
        m[k] = v.get<std::string>();
      }
      raw = FlatConfig::from_map(std::move(m));
    } else {
      raw = FlatConfig::parse(text);
    }
    return run(load_run_config(std::move(raw), ov));
  } catch (const json::exception& e) {
    out.message = std::string("report: ") + e.what();
  } catch (const std::exception& e) {
    out.message = e.what();
  }
  out.exit_code = kExitConfig;
  return out;
}

RunResult run_file(const std::string& path, const Overrides& ov) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    RunResult r;
    r.exit_code = kExitConfig;
    r.message = "cannot read " + path;
    return r;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return run_text(ss.str(), ov);
}

std::string format_csv(const std::vector<std::array<double, 4>>& rows) {
  std::string out = "t,x,dax,residual\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.15g,%.15g,%.15g,%.15g\n", r[0], r[1], r[2], r[3]);
    out += buf;
  }
  return out;
}

void write_outputs(const RunResult& r, const std::string& dir) {
  namespace fs = std::filesystem;
  if (r.rows.empty() && r.report.empty()) return;
  fs::create_directories(dir);
  auto put = [&](const std::string& name, const std::string& body) {
    std::ofstream f(fs::path(dir) / name, std::ios::binary);
    if (!f) throw Error("cannot write " + (fs::path(dir) / name).string());
    f << body;
  };
  if (!r.rows.empty()) put(r.csv_name, format_csv(r.rows));
  if (!r.report.empty()) put(r.json_name, r.report);
}

}  // namespace conform
