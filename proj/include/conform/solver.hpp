#pragma once

#include <span>
#include <utility>
#include <vector>

#include "conform/confcalc.hpp"
#include "conform/field.hpp"
#include "conform/gains.hpp"
#include "conform/trajectory.hpp"

namespace conform {

// L x = D^a[p D^a x] + q x = h on [lo, hi].
struct SelfAdjointProblem {
  KappaPair pair;
  ScalarField p;
  ScalarField q;
  ScalarField h;
  double lo;
  double hi;

  // Interval inside the domain, p > 0 on a 1024-point probe, finite q and h.
  void validate() const;
};

// a D^a D^a x + b D^a x + c x = g on [lo, hi].
struct GeneralProblem {
  KappaPair pair;
  ScalarField a, b, c, g;
  double lo;
  double hi;

  void validate() const;
};

struct IVPSpec {
  double t0;
  double x0;
  double x1;  // D^a x(t0)
};

// Initial state (x, D^a x) at a common t0, with or without the forcing h.
struct InitialState {
  double x0;
  double x1;
  bool forced = true;
};

Trajectory solve_ivp(const SelfAdjointProblem& prob, const IVPSpec& ivp, double step);

// Several solutions on one shared adaptive grid, so linear combinations of
// them are exact node by node.
std::vector<Trajectory> solve_ivp_batch(const SelfAdjointProblem& prob, double t0,
                                        std::span<const InitialState> states, double step);

// Integrates the general equation directly, without converting it.
Trajectory solve_general_ivp(const GeneralProblem& gp, const IVPSpec& ivp, double step);

SelfAdjointProblem to_self_adjoint(const GeneralProblem& gp, double t0, const QuadratureConfig& quad = {});

double wronskian(const KappaPair& pair, const Trajectory& x, const Trajectory& y, double t);

// (x, D^a x)(t0) = (1, 0) and (0, 1/p(t0)); h is ignored.
std::pair<Trajectory, Trajectory> basis(const SelfAdjointProblem& prob, double t0, double step);

// t -> D^a[p D^a x] + q x - h from the interpolated channels.
ScalarField lx_residual(const SelfAdjointProblem& prob, const Trajectory& traj);

// L applied to a smooth field (h not subtracted).
ScalarField apply_L(const SelfAdjointProblem& prob, const ScalarField& x);

// x D^a y - y D^a x for fields.
ScalarField wronskian_field(const KappaPair& pair, const ScalarField& x, const ScalarField& y);

// Default solver step for an interval: (hi - lo)/400, capped at 0.01.
double default_step(double lo, double hi);

}  // namespace conform
