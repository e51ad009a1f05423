#include "conform/config.hpp"

#include <charconv>
#include <cmath>
#include <set>

#include "conform/confcalc.hpp"
#include "conform/grid.hpp"

namespace conform {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool valid_key(std::string_view k) {
  if (k.empty() || k.front() == '.' || k.back() == '.') return false;
  for (char c : k)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.')) return false;
  return k.find("..") == std::string_view::npos;
}

const std::set<std::string, std::less<>> kKeys = {
    "schema_version", "task",          "kappa.family",     "kappa.alpha",         "kappa.omega",
    "coeff.p",        "coeff.q",       "coeff.h",          "coeff.a",             "coeff.b",
    "coeff.c",        "coeff.g",       "interval.lo",      "interval.hi",         "interval.h1_length",
    "ivp.t0",         "ivp.x0",        "ivp.dax0",         "bc.kind",             "bc.xi",
    "bc.beta",        "bc.gamma",      "bc.delta",         "bc.A",                "bc.B",
    "green.method",   "cauchy.s",      "disconjugacy.criterion", "flw.ladder",    "check.exact",
    "numerics.tol",   "numerics.bc_tol", "numerics.agree_tol", "numerics.exact_tol", "numerics.grid",
    "numerics.kernel_grid", "numerics.step", "numerics.quad_abs", "numerics.quad_rel", "output.csv",
    "output.json"};

bool known_key(std::string_view k) { return kKeys.count(k) || k.starts_with("symbols."); }

class Reader {
 public:
  explicit Reader(const FlatConfig& c) : c_(c) {}
  SymbolTable symbols;

  Expression expr(std::string_view key) const {
    try {
      return parse_expression(c_.get(key), symbols);
    } catch (const ParseError& e) {
      throw ConfigError(std::string(key) + ": " + e.what());
    }
  }

  double number(std::string_view key) const {
    auto e = expr(key);
    auto v = e.constant_value();
    if (!v) throw ConfigError(std::string(key) + ": expected a constant");
    if (!std::isfinite(*v)) throw ConfigError(std::string(key) + ": not finite");
    return *v;
  }

  double number(std::string_view key, double fallback) const { return c_.has(key) ? number(key) : fallback; }

  std::size_t count(std::string_view key, std::size_t fallback, std::size_t min) const {
    if (!c_.has(key)) return fallback;
    const auto& s = c_.get(key);
    std::size_t v = 0;
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size() || v < min)
      throw ConfigError(std::string(key) + ": expected an integer >= " + std::to_string(min));
    return v;
  }

  Setting setting(std::string_view key, double fallback) const {
    if (!c_.has(key)) return {fallback, Source::default_value};
    double v = number(key);
    if (!(v > 0)) throw ConfigError(std::string(key) + ": must be positive");
    return {v, Source::config};
  }

  std::string text(std::string_view key, std::string fallback) const {
    return c_.has(key) ? c_.get(key) : fallback;
  }

 private:
  const FlatConfig& c_;
};

double solve_h1_length(const KappaPair& pair, double lo, double length, const QuadratureConfig& quad) {
  if (!(length > 0)) throw ConfigError("interval.h1_length: must be positive");
  if (lo == 0.0) return pi_star(pair, length, quad);
  pair.require_in_domain(lo, "interval.lo");
  const double dhi = pair.domain().hi;
  double w = 1.0, hi = lo + w;
  auto f = [&](double t) { return h1(pair, t, lo, quad) - length; };
  while (f(hi) < 0) {
    w *= 2;
    hi = std::isfinite(dhi) ? std::min(lo + w, 0.5 * (hi + dhi)) : lo + w;
    if (w > 1e12) throw ConfigError("interval.h1_length: not reached inside the domain");
  }
  double a = lo;
  for (int i = 0; i < 200 && hi - a > 1e-15 * std::max(1.0, std::abs(hi)); ++i) {
    double m = 0.5 * (a + hi);
    (f(m) < 0 ? a : hi) = m;
  }
  return 0.5 * (a + hi);
}

void probe_finite(const ScalarField& f, const std::string& key, double lo, double hi) {
  for (double t : linspace(lo, hi, 257))
    if (!std::isfinite(f(t))) throw ConfigError(key + ": not finite at t = " + std::to_string(t));
}

}  // namespace

FlatConfig FlatConfig::parse(std::string_view text) {
  FlatConfig c;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    if (auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    const std::string where = "line " + std::to_string(line_no);
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected 'key = value'");
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (!valid_key(key)) throw ConfigError(where + ": invalid key '" + std::string(key) + "'");
    if (value.empty()) throw ConfigError(where + ": empty value for '" + std::string(key) + "'");
    if (c.has(key)) throw ConfigError(where + ": duplicate key '" + std::string(key) + "'");
    c.set(std::string(key), std::string(value));
  }
  return c;
}

FlatConfig FlatConfig::from_map(std::map<std::string, std::string> entries) {
  FlatConfig c;
  for (auto& [k, v] : entries) {
    if (!valid_key(k)) throw ConfigError("invalid key '" + k + "'");
    c.set(k, v);
  }
  return c;
}

bool FlatConfig::has(std::string_view key) const { return entries_.find(key) != entries_.end(); }

const std::string& FlatConfig::get(std::string_view key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("missing key '" + std::string(key) + "'");
  return it->second;
}

std::optional<std::string> FlatConfig::find(std::string_view key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void FlatConfig::set(std::string key, std::string value) { entries_[std::move(key)] = std::move(value); }

std::string FlatConfig::to_text() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
  return out;
}

namespace {
constexpr const char* kTaskNames[] = {"ivp",      "bvp",          "green",      "cauchy", "riccati",
                                      "lyapunov", "disconjugacy", "roundabout", "flw",    "audit"};
}

std::string to_string(Task t) { return kTaskNames[static_cast<int>(t)]; }

Task task_from_string(std::string_view name) {
  for (int i = 0; i < 10; ++i)
    if (name == kTaskNames[i]) return static_cast<Task>(i);
  throw ConfigError("task: unknown task '" + std::string(name) + "'");
}

std::string to_string(GreenMethod m) {
  switch (m) {
    case GreenMethod::phipsi: return "phipsi";
    case GreenMethod::cauchy: return "cauchy";
    case GreenMethod::closed_form: return "closed_form";
    case GreenMethod::periodic: return "periodic";
  }
  return "?";
}

std::string to_string(Source s) {
  switch (s) {
    case Source::default_value: return "default";
    case Source::config: return "config";
    case Source::cli: return "cli";
  }
  return "?";
}

RunConfig load_run_config(FlatConfig raw, const Overrides& ov) {
  for (const auto& [k, v] : raw.entries())
    if (!known_key(k)) throw ConfigError("unknown key '" + k + "'");
  if (ov.tol) {
    if (!(*ov.tol > 0)) throw ConfigError("--tol: must be positive");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", *ov.tol);
    raw.set("numerics.tol", buf);
  }
  if (ov.grid) raw.set("numerics.grid", std::to_string(*ov.grid));

  RunConfig rc;
  Reader r(raw);
  if (raw.get("schema_version") != std::to_string(kSchemaVersion))
    throw ConfigError("schema_version: expected " + std::to_string(kSchemaVersion));
  rc.task = task_from_string(raw.get("task"));

  for (const auto& [k, v] : raw.entries())
    if (k.starts_with("symbols.")) {
      const std::string name = k.substr(8);
      if (name == "t" || name == "pi" || name.find('.') != std::string::npos || std::isdigit(name[0]))
        throw ConfigError(k + ": reserved or malformed symbol name");
      r.symbols[name] = r.number(k);  // symbols may not refer to each other
    }

  rc.quad.abs_tol = r.number("numerics.quad_abs", rc.quad.abs_tol);
  rc.quad.rel_tol = r.number("numerics.quad_rel", rc.quad.rel_tol);
  rc.quad.validate();
  rc.tol = r.setting("numerics.tol", rc.tol.value);
  if (ov.tol) rc.tol.source = Source::cli;
  rc.bc_tol = r.setting("numerics.bc_tol", rc.bc_tol.value);
  rc.agree_tol = r.setting("numerics.agree_tol", rc.agree_tol.value);
  rc.exact_tol = r.setting("numerics.exact_tol", rc.exact_tol.value);
  rc.grid = r.count("numerics.grid", rc.grid, 2);
  rc.grid_source = ov.grid ? Source::cli : raw.has("numerics.grid") ? Source::config : Source::default_value;
  rc.kernel_grid = r.count("numerics.kernel_grid", rc.kernel_grid, 4);
  rc.step = r.number("numerics.step", 0.0);
  if (rc.step < 0) throw ConfigError("numerics.step: must be >= 0");

  try {
    const Family fam = family_from_string(raw.get("kappa.family"));
    if (fam == Family::custom) throw ConfigError("kappa.family: custom pairs are not configurable");
    std::optional<double> omega;
    if (raw.has("kappa.omega")) omega = r.number("kappa.omega");
    rc.pair = KappaPair::make(fam, Alpha(r.number("kappa.alpha")), omega);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("kappa: ") + e.what());
  }

  const double lo = r.number("interval.lo");
  if (raw.has("interval.hi") == raw.has("interval.h1_length"))
    throw ConfigError("interval: give exactly one of interval.hi and interval.h1_length");
  const double hi = raw.has("interval.hi") ? r.number("interval.hi")
                                           : solve_h1_length(rc.pair, lo, r.number("interval.h1_length"), rc.quad);
  if (!(hi > lo)) throw ConfigError("interval: need lo < hi");

  auto field = [&](const std::string& key, const char* fallback) {
    const std::string text = r.text(key, fallback);
    rc.coefficient_text[key.substr(6)] = text;
    ScalarField f = raw.has(key) ? r.expr(key).to_field(text) : parse_expression(text).to_field(text);
    probe_finite(f, key, lo, hi);
    return f;
  };
  const bool self_adjoint = raw.has("coeff.p") || raw.has("coeff.q") || raw.has("coeff.h");
  const bool general = raw.has("coeff.a") || raw.has("coeff.b") || raw.has("coeff.c") || raw.has("coeff.g");
  if (self_adjoint == general) throw ConfigError("coeff: give either p, q, h or a, b, c, g");
  try {
    if (self_adjoint) {
      if (!raw.has("coeff.p")) throw ConfigError("missing key 'coeff.p'");
      rc.problem = {rc.pair, field("coeff.p", "1"), field("coeff.q", "0"), field("coeff.h", "0"), lo, hi};
    } else {
      if (!raw.has("coeff.a")) throw ConfigError("missing key 'coeff.a'");
      GeneralProblem gp{rc.pair, field("coeff.a", "1"), field("coeff.b", "0"), field("coeff.c", "0"),
                        field("coeff.g", "0"), lo, hi};
      gp.validate();
      rc.problem = to_self_adjoint(gp, lo, rc.quad);
    }
    rc.problem.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("problem: ") + e.what());
  }

  if (rc.step == 0.0) rc.step = default_step(lo, hi);
  if (raw.has("check.exact")) rc.exact = r.expr("check.exact");

  auto in_interval = [&](double t, const char* key) {
    if (t < lo || t > hi) throw ConfigError(std::string(key) + ": outside the interval");
    return t;
  };

  switch (rc.task) {
    case Task::ivp:
    case Task::riccati:
      rc.ivp = {in_interval(r.number("ivp.t0", lo), "ivp.t0"), r.number("ivp.x0"), r.number("ivp.dax0")};
      break;
    case Task::bvp:
    case Task::green: {
      const std::string kind = r.text("bc.kind", "conjugate");
      const double A = r.number("bc.A", 0.0), B = r.number("bc.B", 0.0);
      if (kind == "general")
        rc.bc = BVPSpec::general(r.number("bc.xi"), r.number("bc.beta"), r.number("bc.gamma"), r.number("bc.delta"), A, B);
      else if (kind == "conjugate")
        rc.bc = BVPSpec::conjugate(A, B);
      else if (kind == "focal")
        rc.bc = BVPSpec::focal(A, B);
      else if (kind == "periodic")
        rc.bc = BVPSpec::periodic(A, B);
      else
        throw ConfigError("bc.kind: unknown kind '" + kind + "'");
      if (kind != "general")
        for (const char* k : {"bc.xi", "bc.beta", "bc.gamma", "bc.delta"})
          if (raw.has(k)) throw ConfigError(std::string(k) + ": only used with bc.kind = general");
      try {
        rc.bc.validate();
      } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("bc: ") + e.what());
      }
      if (rc.task == Task::green) {
        const std::string m = r.text("green.method", rc.bc.kind == BVPKind::periodic ? "periodic" : "phipsi");
        if (m == "phipsi") rc.green_method = GreenMethod::phipsi;
        else if (m == "cauchy") rc.green_method = GreenMethod::cauchy;
        else if (m == "closed_form") rc.green_method = GreenMethod::closed_form;
        else if (m == "periodic") rc.green_method = GreenMethod::periodic;
        else throw ConfigError("green.method: unknown method '" + m + "'");
        if ((rc.green_method == GreenMethod::periodic) != (rc.bc.kind == BVPKind::periodic))
          throw ConfigError("green.method: periodic method goes with bc.kind = periodic");
        if (rc.green_method == GreenMethod::phipsi && rc.bc.kind == BVPKind::periodic)
          throw ConfigError("green.method: phipsi needs separated conditions");
        if (rc.green_method == GreenMethod::closed_form &&
            (!rc.problem.q.is_zero() || (rc.bc.kind != BVPKind::conjugate && rc.bc.kind != BVPKind::focal)))
          throw ConfigError("green.method: closed_form needs q = 0 and a conjugate or focal kind");
        if (rc.bc.A != 0.0 || rc.bc.B != 0.0) throw ConfigError("bc: the green task takes homogeneous conditions");
      }
      break;
    }
    case Task::cauchy: rc.cauchy_s = in_interval(r.number("cauchy.s", lo), "cauchy.s"); break;
    case Task::disconjugacy: {
      const std::string c = r.text("disconjugacy.criterion", "v");
      if (c == "v") rc.criterion = ReidCriterion::reid_v;
      else if (c == "vi") rc.criterion = ReidCriterion::reid_vi;
      else throw ConfigError("disconjugacy.criterion: expected v or vi");
      break;
    }
    case Task::flw: {
      std::string_view s = raw.get("flw.ladder");
      while (!s.empty()) {
        auto comma = s.find(',');
        auto item = trim(s.substr(0, comma));
        s.remove_prefix(comma == std::string_view::npos ? s.size() : comma + 1);
        auto e = parse_expression(item, r.symbols).constant_value();
        if (!e || !(*e > lo) || *e > hi) throw ConfigError("flw.ladder: entries must be constants in (lo, hi]");
        if (!rc.ladder.empty() && *e <= rc.ladder.back()) throw ConfigError("flw.ladder: must increase");
        rc.ladder.push_back(*e);
      }
      if (rc.ladder.size() < 2) throw ConfigError("flw.ladder: need at least two points");
      break;
    }
    default: break;
  }

  rc.csv_name = r.text("output.csv", rc.csv_name);
  rc.json_name = r.text("output.json", rc.json_name);
  for (const auto* n : {&rc.csv_name, &rc.json_name})
    if (n->find('/') != std::string::npos || *n == "." || *n == "..")
      throw ConfigError("output: file names only, directories come from --out");
  rc.raw = std::move(raw);
  return rc;
}

}  // namespace conform
