#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "conform/errors.hpp"
#include "conform/expr.hpp"
#include "conform/greens.hpp"
#include "conform/oscillation.hpp"

namespace conform {

inline constexpr int kSchemaVersion = 1;

// `key = value` lines; '#' starts a comment; keys are dotted paths.
class FlatConfig {
 public:
  static FlatConfig parse(std::string_view text);
  static FlatConfig from_map(std::map<std::string, std::string> entries);

  bool has(std::string_view key) const;
  const std::string& get(std::string_view key) const;  // throws ConfigError
  std::optional<std::string> find(std::string_view key) const;
  void set(std::string key, std::string value);
  const std::map<std::string, std::string, std::less<>>& entries() const noexcept { return entries_; }
  std::string to_text() const;

 private:
  std::map<std::string, std::string, std::less<>> entries_;
};

enum class Task { ivp, bvp, green, cauchy, riccati, lyapunov, disconjugacy, roundabout, flw, audit };

std::string to_string(Task t);
Task task_from_string(std::string_view name);

enum class GreenMethod { phipsi, cauchy, closed_form, periodic };

std::string to_string(GreenMethod m);

// Where a numeric setting came from, reported next to its value.
enum class Source { default_value, config, cli };

std::string to_string(Source s);

struct Setting {
  double value;
  Source source;
};

struct RunConfig {
  FlatConfig raw;  // effective key set, overrides applied
  Task task = Task::ivp;
  KappaPair pair = KappaPair::make(Family::trig, Alpha(1.0));
  SelfAdjointProblem problem{pair, ScalarField::constant(1.0), ScalarField(), ScalarField(), 0.0, 1.0};
  std::map<std::string, std::string> coefficient_text;
  std::optional<Expression> exact;  // check.exact

  IVPSpec ivp{0.0, 0.0, 1.0};
  BVPSpec bc;
  GreenMethod green_method = GreenMethod::phipsi;
  double cauchy_s = 0.0;
  ReidCriterion criterion = ReidCriterion::reid_v;
  std::vector<double> ladder;

  Setting tol{1e-4, Source::default_value};        // residual sup-norms
  Setting bc_tol{1e-8, Source::default_value};     // boundary and initial conditions
  Setting agree_tol{1e-6, Source::default_value};  // cross-construction agreement
  Setting exact_tol{1e-4, Source::default_value};  // against check.exact
  std::size_t grid = 201;
  Source grid_source = Source::default_value;
  std::size_t kernel_grid = 129;
  double step = 0.0;  // solver step; 0 in the config picks default_step
  QuadratureConfig quad;

  std::string csv_name = "trajectory.csv";
  std::string json_name = "report.json";
};

struct Overrides {
  std::optional<double> tol;
  std::optional<std::size_t> grid;
};

// Validates the key set against the schema and builds the problem.
RunConfig load_run_config(FlatConfig raw, const Overrides& ov = {});

}  // namespace conform
