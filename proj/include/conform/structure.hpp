#pragma once

#include <array>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "conform/solver.hpp"

namespace conform {

struct KernelPoint {
  double value;
  double dax;  // D^a in the first argument
};

// K(t, s) sampled on t_grid x s_grid (row-major in t), plus a continuous
// evaluator that reproduces the samples at grid nodes.
class Kernel {
 public:
  using Eval = std::function<KernelPoint(double t, double s)>;

  Kernel(std::vector<double> t_grid, std::vector<double> s_grid, Eval eval);
  // Samples supplied by the producer.
  Kernel(std::vector<double> t_grid, std::vector<double> s_grid, std::vector<double> values,
         std::vector<double> dax, Eval eval);

  const std::vector<double>& t_grid() const noexcept { return t_; }
  const std::vector<double>& s_grid() const noexcept { return s_; }
  double value(std::size_t i, std::size_t j) const { return values_[i * s_.size() + j]; }
  double dax(std::size_t i, std::size_t j) const { return dax_[i * s_.size() + j]; }
  KernelPoint operator()(double t, double s) const { return eval_(t, s); }

 private:
  std::vector<double> t_, s_, values_, dax_;
  Eval eval_;
};

inline constexpr std::size_t kDefaultKernelGrid = 129;

// Cubic Lagrange interpolation across the four columns nearest s.
// Returns the column index of the first stencil point and the weights.
std::pair<std::size_t, std::array<double, 4>> column_stencil(const std::vector<double>& s_grid, double s);

enum class CauchyMethod { ivp_sweep, basis_formula };

// Cauchy function x(t, s): L x(., s) = 0, x(s, s) = 0, D^a x(s, s) = 1/p(s).
// An empty s_grid means 129 uniform points on the problem interval; the
// t grid equals the s grid. step <= 0 picks default_step.
Kernel cauchy_kernel(const SelfAdjointProblem& prob, CauchyMethod method, std::vector<double> s_grid = {},
                     double step = 0.0);

// x(t) = int_a^t x(t, s) h(s) d_a s over the whole interval.
Trajectory variation_of_constants(const SelfAdjointProblem& prob, double a, double step = 0.0);

// Minimum of |x| relative to max |x| on the trajectory nodes must exceed 1e-8.
void require_nonvanishing(const Trajectory& x, const char* what);

// y = x int_{t0}^t e0^2(s, t0) / (p x^2) d_a s, on the grid of x.
Trajectory reduce_order(const SelfAdjointProblem& prob, const Trajectory& x, double t0);

// (c1, c2) = (y(t0)/x(t0), p(t0) W(x, y)(t0)).
std::pair<double, double> reduction_constants(const SelfAdjointProblem& prob, const Trajectory& x,
                                              const Trajectory& y, double t0);

struct RiccatiProblem {
  KappaPair pair;
  ScalarField p;
  ScalarField q;
  double lo;
  double hi;
};

RiccatiProblem riccati_problem(const SelfAdjointProblem& prob);

// z = p D^a x / x.
ScalarField riccati_from_solution(const SelfAdjointProblem& prob, const Trajectory& x);
ScalarField riccati_from_field(const KappaPair& pair, const ScalarField& p, const ScalarField& x);

// R z = D^a z + q + z^2/p - kappa1 z.
ScalarField riccati_residual(const RiccatiProblem& rp, const ScalarField& z);

// x = e_{z/p}(t, t0) with D^a x = z x / p.
Trajectory solution_from_riccati(const RiccatiProblem& rp, const ScalarField& z, double t0, double step = 0.0);

enum class FactorKind { polya, trench };

struct FactorPair {
  ScalarField first;   // rho1 or gamma1
  ScalarField second;  // rho2 or gamma2
  FactorKind kind;
};

// L y - first D^a{ second D^a[first y] }.
ScalarField factorization_residual(const SelfAdjointProblem& prob, const FactorPair& f, const ScalarField& y);

// rho1 = e0(t, a)/x, rho2 = p x^2 / e0^2(t, a).
FactorPair polya_factors(const SelfAdjointProblem& prob, const Trajectory& x, double a);

struct TrenchReport {
  FactorPair factors;
  bool divergent = false;        // int_a^b delta2 judged effectively infinite
  double delta2_integral = 0.0;  // int_a^b delta2 d_a t
  double first_decile = 0.0;     // int over the first tenth of [a, b]
  std::vector<double> ladder;    // T values approaching b
  std::vector<double> partial;   // int_a^T 1/gamma2 d_a t
};

// delta2 = 1/rho2. Divergent when int_a^b delta2 > 1e6 times the first-decile
// integral; the Polya pair is then returned as is.
TrenchReport trench_factors(const SelfAdjointProblem& prob, const Trajectory& x, double a, double b);

// y = x [y_a/x(a) + int_a^t (w_a e0^2(s, a) + e0^2(s, a) int_a^s x h e0^2(a, r) d_a r) / (p x^2) d_a s]
// with w_a = p(a) W(x, y)(a).
Trajectory variation_of_parameters(const SelfAdjointProblem& prob, const Trajectory& x, double y_a, double w_a,
                                   double a);

enum class RecessiveVerdict { u_recessive, v_recessive, inconclusive };

std::string to_string(RecessiveVerdict v);

struct RecessiveReport {
  std::vector<double> ladder;
  std::vector<double> ratio;       // |u/v| at each ladder point
  std::vector<double> integral_u;  // int_{T0}^T e0^2(t, a)/(p u^2) d_a t, T0 = ladder[0]
  std::vector<double> integral_v;
  int ratio_trend = 0;       // -1: |u/v| decreasing, +1: increasing, 0: neither
  int integral_growth = 0;   // -1: u integral grows and v stays bounded, +1: the reverse
  int riccati_order = 0;     // -1: p D v / v > p D u / u on the tail, +1: reverse
  bool zeros_on_tail = false;
  RecessiveVerdict verdict = RecessiveVerdict::inconclusive;
  std::string note;  // the ladder tests are heuristic
};

RecessiveReport classify_recessive_dominant(const SelfAdjointProblem& prob, const Trajectory& u,
                                            const Trajectory& v, double a, const std::vector<double>& ladder);

}  // namespace conform
