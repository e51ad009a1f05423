#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "conform/solver.hpp"

namespace conform {

// eta on [a, b] with eta(a) = eta(b) = 0; kinks listed in breakpoints.
// deta, when present, is D^a eta used verbatim (needed across kinks).
struct AdmissibleField {
  ScalarField eta;
  double a;
  double b;
  std::vector<double> breakpoints;
  std::optional<ScalarField> deta;

  // Endpoint conditions to 1e-12 and eta not identically zero on a probe.
  void validate() const;
  ScalarField dalpha(const KappaPair& pair) const;
};

// eta = u on (c, d), 0 elsewhere in [a, b].
AdmissibleField solution_cutoff(const Trajectory& u, double c, double d, double a, double b);

// e0(t, a) B(h1(t, a)/h1(b, a)) for the eight fixed tent and smooth profiles.
std::array<AdmissibleField, 8> bump_family(const KappaPair& pair, double a, double b);

// int_a^b [p (D^a eta)^2 - q eta^2] e0^2(b, t) d_a t.
double quadratic_functional(const SelfAdjointProblem& prob, const AdmissibleField& adm,
                            const QuadratureConfig& quad = {});

// (D^a[z eta^2] + kappa1 z eta^2) - (p (D^a eta)^2 - q eta^2 - p (D^a eta - z eta/p)^2).
ScalarField picone1_residual(const SelfAdjointProblem& prob, const ScalarField& z, const AdmissibleField& adm);

struct ComparisonPair {
  SelfAdjointProblem prob1;
  SelfAdjointProblem prob2;

  void validate() const;  // same gain pair and interval
};

// D^a[(u/v)(p1 v D^a u - p2 u D^a v)] - [(q2 - q1) u^2 + (p1 - p2)(D^a u)^2 + p2 (D^a u - u D^a v / v)^2].
ScalarField picone2_residual(const ComparisonPair& cmp, const Trajectory& u, const Trajectory& v);

// Sign-change zeros of the interpolant (and exact zero nodes), bisected to 1e-10.
std::vector<double> find_zeros(const Trajectory& x);

enum class ReidCriterion { reid_v, reid_vi };

struct DisconjugacyVerdict {
  bool disconjugate;
  std::vector<double> zeros;  // zeros found away from the starting endpoint
  double min_ratio;           // min of x/e0, signed by its first sample, over max |x/e0|; start excluded
};

// (v): u(a) = 0, D^a u(a) = 1/p(a) nonzero on (a, b].
// (vi): v(b) = 0, D^a v(b) = 1/p(b) nonzero on [a, b).
DisconjugacyVerdict disconjugate(const SelfAdjointProblem& prob, double a, double b, ReidCriterion criterion,
                                 double step = 0.0);

struct RoundaboutReport {
  std::array<bool, 6> criteria{};  // (i) .. (vi)
  bool all_agree = false;
  double best_angle = 0.0;         // initial angle of the best nonvanishing candidate in (i)
  std::array<double, 8> functional{};  // F over the bump family, for (iii)
  int max_fan_zeros = 0;           // for (iv)
  std::string note;
};

// Initial-angle family: x(a) = cos th, p(a) D^a x(a) = sin th, 64 angles in [0, pi).
RoundaboutReport roundabout_audit(const SelfAdjointProblem& prob, double a, double b, double step = 0.0);

struct SturmReport {
  bool u_has_two_zeros = false;
  double a = 0.0, b = 0.0;       // consecutive zeros of u
  bool hypothesis_holds = false;  // q2 >= q1, p1 >= p2 > 0 on the grid
  bool strict = false;            // one of them strict somewhere
  bool independent = false;       // u, v linearly independent
  bool v_zero_in_between = false;
  bool verdict = false;           // hypotheses hold and v vanishes in (a, b)
  std::string note;
};

SturmReport sturm_compare(const ComparisonPair& cmp, const Trajectory& u, const Trajectory& v);

struct LyapunovResult {
  double lhs;  // int_a^b q e0(b, t) d_a t
  double rhs;  // 4 e0(b, a) / h1(b, a)
  bool necessary_holds;
  bool sufficient_disconjugacy;
};

// Requires p == 1 and q > 0 on [a, b].
LyapunovResult lyapunov_check(const SelfAdjointProblem& prob, double a, double b, const QuadratureConfig& quad = {},
                              double tol = 1e-6);

// int_a^b q e0(b, t) d_a t for any q.
double lyapunov_integral(const KappaPair& pair, const ScalarField& q, double a, double b,
                         std::span<const double> breakpoints = {}, const QuadratureConfig& quad = {});

// Extremal construction on [0, 1]: x = e0(t, c - delta) h1(t, 0) on the left,
// e0(t, c - delta) h1(1, t) on the right, joined by a concave C^2 middle with
// D^a D^a x <= 0; q = -D^a D^a x / x * e0(t, 0) on the middle and 0 outside.
struct SharpnessSample {
  double delta;
  double c;      // h1(c, 0) = h1(1, c)
  double lhs;    // int_0^1 q e0(1, t) d_a t
  double upper;  // 4 e0(1, 0) / (h1(1, 0) - 2 h1(c, c - delta))
  double rhs;    // 4 e0(1, 0) / h1(1, 0)
  ScalarField x;
  ScalarField dax;
  ScalarField ddax;  // D^a D^a x
  ScalarField q;
  std::vector<double> breakpoints;
};

SharpnessSample lyapunov_sharpness(const KappaPair& pair, double delta, const QuadratureConfig& quad = {});

struct FlwReport {
  std::vector<double> ladder;
  std::vector<double> weight_integral;  // int_a^T e0(t, a)/p d_a t
  std::vector<double> q_integral;       // int_a^T q d_a t
  double weight_slope = 0.0;            // log-log slope against T - a over the ladder
  double q_slope = 0.0;
  bool oscillation_predicted = false;   // both slopes above the threshold
  std::vector<double> zeros;            // of u(a) = 0, D^a u(a) = 1/p(a) on [a, T_max]
  std::string note;
};

inline constexpr double kFlwSlopeThreshold = 0.5;

FlwReport flw_scan(const SelfAdjointProblem& prob, double a, const std::vector<double>& ladder, double step = 0.0);

}  // namespace conform
