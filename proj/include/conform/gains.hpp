#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "conform/field.hpp"

namespace conform {

enum class Family { trig, power, time_power, custom };

std::string_view to_string(Family f);
Family family_from_string(std::string_view name);

// Order of the operator, restricted to (0, 1].
class Alpha {
 public:
  explicit Alpha(double value);
  double value() const noexcept { return value_; }

 private:
  double value_;
};

// Open interval (lo, hi); infinities allowed.
struct Domain {
  double lo;
  double hi;
  bool contains(double t) const noexcept { return t > lo && t < hi; }
  bool contains(double a, double b) const noexcept { return contains(a) && contains(b); }
};

// The gain pair (kappa0, kappa1) behind D^a f = kappa1 f + kappa0 f'.
// Immutable; copies share the underlying fields.
class KappaPair {
 public:
  static KappaPair make(Family family, Alpha alpha, std::optional<double> omega = std::nullopt);
  static KappaPair custom(Alpha alpha, ScalarField kappa0, ScalarField kappa1, Domain domain);

  double alpha() const noexcept { return alpha_; }
  Family family() const noexcept { return family_; }
  std::optional<double> omega() const noexcept { return omega_; }
  Domain domain() const noexcept { return domain_; }
  const ScalarField& kappa0() const noexcept { return kappa0_; }
  const ScalarField& kappa1() const noexcept { return kappa1_; }
  double k0(double t) const { return kappa0_(t); }
  double k1(double t) const { return kappa1_(t); }

  // Closed-form antiderivatives of kappa1/kappa0 and 1/kappa0 (built-in
  // families only); empty for custom pairs, which fall back to quadrature.
  const std::function<double(double)>& ratio_primitive() const noexcept { return ratio_primitive_; }
  const std::function<double(double)>& inverse_primitive() const noexcept { return inverse_primitive_; }

  // Throws DomainError naming `what` when t is outside the domain.
  void require_in_domain(double t, const char* what = "t") const;

 private:
  KappaPair() = default;
  double alpha_ = 1.0;
  Family family_ = Family::custom;
  std::optional<double> omega_;
  Domain domain_{};
  ScalarField kappa0_, kappa1_;
  std::function<double(double)> ratio_primitive_, inverse_primitive_;
};

struct Violation {
  double t;
  std::string what;
};

struct LimitSample {
  double alpha;
  double t;
  double kappa0;
  double kappa1;
  bool ok;
};

struct ValidationReport {
  std::vector<Violation> violations;
  std::vector<LimitSample> limits;  // empty for custom pairs
  bool limits_checked = false;
  bool custom_caveat = false;  // limit conditions not machine-checked

  bool ok() const;
};

ValidationReport validate(const KappaPair& pair, const std::vector<double>& grid);

}  // namespace conform
