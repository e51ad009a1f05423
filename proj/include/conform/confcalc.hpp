#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "conform/field.hpp"
#include "conform/gains.hpp"
#include "conform/quadrature.hpp"

namespace conform {

struct ExpArgs {
  ScalarField p;
  KappaPair pair;
};

// D^a f(t) = kappa1 f + kappa0 f'.
double dalpha(const KappaPair& pair, const ScalarField& f, double t);
double dalpha2(const KappaPair& pair, const ScalarField& f, double t);
ScalarField dalpha_field(const KappaPair& pair, const ScalarField& f);

// e_p(t, s) = exp(int_s^t (p - kappa1)/kappa0).
double exp_p(const ExpArgs& args, double t, double s, const QuadratureConfig& quad = {});
double log_exp_p(const ExpArgs& args, double t, double s, const QuadratureConfig& quad = {});

// e_0 and h_1 use the pair's closed primitives when it has them.
double e0(const KappaPair& pair, double t, double s, const QuadratureConfig& quad = {});
double log_e0(const KappaPair& pair, double t, double s, const QuadratureConfig& quad = {});
double h1(const KappaPair& pair, double t, double a, const QuadratureConfig& quad = {});

enum class Weight { none, e0_right, e0sq_right };

// int_a^b f(t) w(t) dt/kappa0(t), w = 1, e0(b,t) or e0(b,t)^2.
double alpha_integral(const KappaPair& pair, const ScalarField& f, double a, double b, Weight weight,
                      const QuadratureConfig& quad = {});

enum class Special { cos_a, sin_a, cosh_a, sinh_a };

double special(const KappaPair& pair, Special kind, double omega, double t, double t0,
               const QuadratureConfig& quad = {});

enum class Geodesic { secant, tangent };

ScalarField geodesic(const KappaPair& pair, const ScalarField& f, double a, std::optional<double> b,
                     Geodesic kind, const QuadratureConfig& quad = {});

double inner_product(const KappaPair& pair, const ScalarField& f, const ScalarField& g, double a,
                     double b, const QuadratureConfig& quad = {});

enum class CriticalKind { alpha_max, alpha_min, saddle };

struct CriticalPoint {
  double t;
  CriticalKind kind;
};

struct CriticalReport {
  std::vector<CriticalPoint> points;
  std::vector<std::pair<double, double>> unresolved;  // brackets of suspected double roots
  bool degenerate = false;                            // D^a f vanishes on the whole grid
};

CriticalReport find_alpha_critical(const KappaPair& pair, const ScalarField& f, double lo, double hi,
                                   int grid_n);

// Fields in t with closed derivatives.
ScalarField e0_field(const KappaPair& pair, double s, const QuadratureConfig& quad = {});  // e0(t, s)
ScalarField e0_field_from(const KappaPair& pair, double b, const QuadratureConfig& quad = {});  // e0(b, t)
ScalarField exp_field(const ExpArgs& args, double s, const QuadratureConfig& quad = {});  // e_p(t, s)
ScalarField h1_field(const KappaPair& pair, double a, const QuadratureConfig& quad = {});  // h1(t, a)
ScalarField special_field(const KappaPair& pair, Special kind, double omega, double t0,
                          const QuadratureConfig& quad = {});

}  // namespace conform
