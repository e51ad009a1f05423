#include "conform/conform.h"

#include <new>
#include <optional>
#include <string>

#include "conform/confcalc.hpp"
#include "conform/expr.hpp"
#include "conform/runner.hpp"

struct conform_run {
  conform::RunResult result;
};

struct conform_expr {
  conform::Expression e;
  conform::ScalarField f;
};

namespace {

thread_local std::string g_error;

int fail(int code, std::string msg) {
  g_error = std::move(msg);
  return code;
}

conform::Overrides overrides(const conform_options* opt) {
  conform::Overrides ov;
  if (opt && opt->tol > 0) ov.tol = opt->tol;
  if (opt && opt->grid > 0) ov.grid = opt->grid;
  return ov;
}

int finish(conform::RunResult r, conform_run** out) {
  const int code = r.exit_code;
  g_error = code == CONFORM_OK ? std::string() : r.message;
  *out = new (std::nothrow) conform_run{std::move(r)};
  if (!*out) return fail(CONFORM_ENUMERICS, "out of memory");
  return code;
}

conform::KappaPair make_pair(conform_family family, double alpha, double omega) {
  using conform::Family;
  switch (family) {
    case CONFORM_TRIG: return conform::KappaPair::make(Family::trig, conform::Alpha(alpha));
    case CONFORM_POWER: return conform::KappaPair::make(Family::power, conform::Alpha(alpha), omega);
    case CONFORM_TIME_POWER: return conform::KappaPair::make(Family::time_power, conform::Alpha(alpha), omega);
  }
  throw conform::InvalidArgument("unknown family");
}

template <class F>
int guarded(F&& f) {
  try {
    f();
    g_error.clear();
    return CONFORM_OK;
  } catch (const conform::NumericsError& e) {
    return fail(CONFORM_ENUMERICS, e.what());
  } catch (const std::exception& e) {
    return fail(CONFORM_ECONFIG, e.what());
  }
}

}  // namespace

extern "C" {

const char* conform_version(void) { return "1.0.0"; }

const char* conform_last_error(void) { return g_error.c_str(); }

int conform_run_file(const char* path, const conform_options* opt, conform_run** out) {
  if (!path || !out) return fail(CONFORM_ECONFIG, "null argument");
  return finish(conform::run_file(path, overrides(opt)), out);
}

int conform_run_text(const char* text, const conform_options* opt, conform_run** out) {
  if (!text || !out) return fail(CONFORM_ECONFIG, "null argument");
  return finish(conform::run_text(text, overrides(opt)), out);
}

int conform_run_status(const conform_run* run) { return run ? run->result.exit_code : CONFORM_ECONFIG; }

const char* conform_run_message(const conform_run* run) { return run ? run->result.message.c_str() : ""; }

const char* conform_run_report(const conform_run* run) { return run ? run->result.report.c_str() : ""; }

size_t conform_run_rows(const conform_run* run) { return run ? run->result.rows.size() : 0; }

int conform_run_row(const conform_run* run, size_t i, double row[4]) {
  if (!run || !row) return fail(CONFORM_ECONFIG, "null argument");
  if (i >= run->result.rows.size()) return fail(CONFORM_ECONFIG, "row index out of range");
  for (int c = 0; c < 4; ++c) row[c] = run->result.rows[i][c];
  return CONFORM_OK;
}

int conform_run_write(const conform_run* run, const char* dir) {
  if (!run || !dir) return fail(CONFORM_ECONFIG, "null argument");
  try {
    conform::write_outputs(run->result, dir);
  } catch (const std::exception& e) {
    return fail(CONFORM_ENUMERICS, e.what());
  }
  return CONFORM_OK;
}

void conform_run_free(conform_run* run) { delete run; }

int conform_expr_parse(const char* text, conform_expr** out, size_t* err_offset) {
  if (!text || !out) return fail(CONFORM_ECONFIG, "null argument");
  *out = nullptr;
  try {
    auto e = conform::parse_expression(text);
    *out = new conform_expr{e, e.to_field()};
  } catch (const conform::ParseError& e) {
    if (err_offset) *err_offset = e.offset();
    return fail(CONFORM_ECONFIG, e.what());
  } catch (const std::exception& e) {
    return fail(CONFORM_ECONFIG, e.what());
  }
  g_error.clear();
  return CONFORM_OK;
}

int conform_expr_eval(const conform_expr* e, double t, double* value, double* deriv) {
  if (!e) return fail(CONFORM_ECONFIG, "null argument");
  return guarded([&] {
    if (value) *value = e->f(t);
    if (deriv) *deriv = e->f.derivative_at(t);
  });
}

void conform_expr_free(conform_expr* e) { delete e; }

int conform_e0(conform_family family, double alpha, double omega, double t, double s, double* out) {
  if (!out) return fail(CONFORM_ECONFIG, "null argument");
  return guarded([&] { *out = conform::e0(make_pair(family, alpha, omega), t, s); });
}

int conform_h1(conform_family family, double alpha, double omega, double t, double a, double* out) {
  if (!out) return fail(CONFORM_ECONFIG, "null argument");
  return guarded([&] { *out = conform::h1(make_pair(family, alpha, omega), t, a); });
}

int conform_pi_star(conform_family family, double alpha, double omega, double target, double* out) {
  if (!out) return fail(CONFORM_ECONFIG, "null argument");
  return guarded([&] { *out = conform::pi_star(make_pair(family, alpha, omega), target); });
}

}  // extern "C"
