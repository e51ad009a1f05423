#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "conform/structure.hpp"

namespace conform {

enum class BVPKind { general, conjugate, focal, periodic };

std::string to_string(BVPKind k);

// general, conjugate, focal: xi x(a) - beta D^a x(a) = A, gamma x(b) + delta D^a x(b) = B.
// periodic: x(a) - e0(a, b) x(b) = A, D^a x(a) - e0(a, b) D^a x(b) = B.
struct BVPSpec {
  BVPKind kind = BVPKind::conjugate;
  double xi = 1.0, beta = 0.0, gamma = 1.0, delta = 0.0;
  double A = 0.0, B = 0.0;

  static BVPSpec general(double xi, double beta, double gamma, double delta, double A = 0.0, double B = 0.0);
  static BVPSpec conjugate(double A = 0.0, double B = 0.0);
  static BVPSpec focal(double A = 0.0, double B = 0.0);
  static BVPSpec periodic(double A = 0.0, double B = 0.0);

  void validate() const;
  BVPSpec homogeneous() const;  // same conditions with A = B = 0
};

// Boundary functionals applied to the basis (x, D^a x)(a) = (1, 0), (0, 1).
struct BoundaryMatrix {
  std::array<std::array<double, 2>, 2> m{};
  double det = 0.0;
  double norm = 0.0;                       // Frobenius
  std::optional<double> closed_form_det;  // q == 0: e0(b, a) p(a) D
  bool degenerate = false;                 // |det| < 1e-10 norm^2
};

BoundaryMatrix boundary_matrix(const SelfAdjointProblem& prob, const BVPSpec& spec, double a, double b,
                               double step = 0.0);

// D = xi gamma int_a^b 1/p d_a t + beta gamma / p(a) + xi delta / p(b).
double q_zero_determinant(const KappaPair& pair, const ScalarField& p, const BVPSpec& spec, double a, double b,
                          const QuadratureConfig& quad = {});

// Shooting with a forced solution and two homogeneous ones; throws
// DegenerateProblem when the boundary system is singular.
Trajectory solve_bvp(const SelfAdjointProblem& prob, const BVPSpec& spec, double a, double b, double step = 0.0);

enum class GreenBranch { u, v };  // u: t <= s, v: t >= s

struct GreenSample {
  KernelPoint u;
  KernelPoint v;
};

// Green's function with both branches available everywhere; operator()
// picks u for t <= s and v for t > s.
class GreenKernel {
 public:
  using BranchEval = std::function<GreenSample(double t, double s)>;

  GreenKernel(double a, double b, std::vector<double> grid, BVPSpec spec, BranchEval eval, std::string method);

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  const BVPSpec& spec() const noexcept { return spec_; }
  const std::string& method() const noexcept { return method_; }
  const std::vector<double>& grid() const noexcept { return samples_.t_grid(); }
  const Kernel& samples() const noexcept { return samples_; }  // G on grid x grid

  KernelPoint operator()(double t, double s) const;
  KernelPoint branch(GreenBranch br, double t, double s) const;
  double continuity_defect() const noexcept { return continuity_; }  // max |u(s,s) - v(s,s)| on the grid

 private:
  double a_, b_;
  BVPSpec spec_;
  BranchEval eval_;
  std::string method_;
  Kernel samples_;
  double continuity_ = 0.0;
};

inline constexpr double kContinuityTol = 1e-6;

// phi(a) = beta, D^a phi(a) = xi; psi(b) = delta, D^a psi(b) = -gamma;
// G = phi(t) psi(s) / (p W)(s) for t <= s and psi(t) phi(s) / (p W)(s) for t >= s.
GreenKernel green_phipsi(const SelfAdjointProblem& prob, const BVPSpec& spec, double a, double b,
                         std::vector<double> grid = {}, double step = 0.0);

// u(., s) solves L u = 0 with the first condition homogeneous and the second
// shifted by the Cauchy function; v = u + x(t, s). Also used for periodic specs.
GreenKernel green_cauchy(const SelfAdjointProblem& prob, const BVPSpec& spec, double a, double b,
                         std::vector<double> grid = {}, double step = 0.0);

GreenKernel green_periodic(const SelfAdjointProblem& prob, double a, double b, std::vector<double> grid = {},
                           double step = 0.0);

// q == 0 kernels from quadratures of 1/p (conjugate or focal kind).
GreenKernel green_closed_form(const KappaPair& pair, const ScalarField& p, double a, double b, BVPKind kind,
                              std::vector<double> grid = {}, const QuadratureConfig& quad = {});

// p with 1/p = e0(b, t) D^a[t / e0(b, t)], which makes int_a^t 1/p d_a = t - a.
ScalarField linear_weight_p(const KappaPair& pair);

// x(t) = int_a^t v(t, s) h(s) d_a s + int_t^b u(t, s) h(s) d_a s on the kernel grid
// (or on out_grid when given).
Trajectory apply_green(const GreenKernel& G, const KappaPair& pair, const ScalarField& h,
                       const QuadratureConfig& quad = {}, std::vector<double> out_grid = {});

struct GreenAudit {
  double symmetry_residual = 0.0;  // max |e0(s,t) G(t,s) - e0(t,s) G(s,t)| on the grid
  double continuity_defect = 0.0;
  bool negativity_applicable = false;  // conjugate kind, p > 0, disconjugate
  bool negative = false;               // all interior samples < 0
  double max_interior = 0.0;
  bool comparison_applicable = false;
  bool comparison_holds = false;  // w = u - v >= 0 when L w <= 0 and w >= 0 at a, b
  double comparison_min = 0.0;
  std::string note;
};

// drive = L u - L v (must be <= 0), at_a, at_b = (u - v)(a), (u - v)(b) (must be >= 0).
struct ComparisonProbe {
  ScalarField drive = ScalarField::constant(-1.0);
  double at_a = 0.0;
  double at_b = 0.0;
};

GreenAudit audit_green(const GreenKernel& G, const SelfAdjointProblem& prob, const ComparisonProbe& probe = {});

// Unique t > 0 with h1(t, 0) = target.
double pi_star(const KappaPair& pair, double target, const QuadratureConfig& quad = {});

}  // namespace conform
