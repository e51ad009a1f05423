#include "conform/gains.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "conform/errors.hpp"

namespace conform {

std::string_view to_string(Family f) {
  switch (f) {
    case Family::trig: return "trig";
    case Family::power: return "power";
    case Family::time_power: return "time_power";
    case Family::custom: return "custom";
  }
  return "custom";
}

Family family_from_string(std::string_view name) {
  if (name == "trig") return Family::trig;
  if (name == "power") return Family::power;
  if (name == "time_power") return Family::time_power;
  if (name == "custom") return Family::custom;
  throw InvalidArgument("unknown gain family '" + std::string(name) + "'");
}

Alpha::Alpha(double value) : value_(value) {
  if (!(value > 0.0 && value <= 1.0)) {
    std::ostringstream msg;
    msg << "alpha must lie in (0, 1], got " << value;
    throw InvalidArgument(msg.str());
  }
}

KappaPair KappaPair::make(Family family, Alpha alpha, std::optional<double> omega) {
  const double a = alpha.value();
  const bool wants_omega = family == Family::power || family == Family::time_power;
  if (family == Family::custom) throw InvalidArgument("use KappaPair::custom for custom pairs");
  if (wants_omega && !omega) throw InvalidArgument("family '" + std::string(to_string(family)) + "' needs omega");
  if (!wants_omega && omega) throw InvalidArgument("family 'trig' takes no omega");
  if (omega && !(*omega > 0.0 && std::isfinite(*omega))) throw InvalidArgument("omega must be a positive real");

  KappaPair k;
  k.alpha_ = a;
  k.family_ = family;
  k.omega_ = omega;
  constexpr double inf = std::numeric_limits<double>::infinity();

  switch (family) {
    case Family::trig: {
      // Exact classical values at a = 1 rather than cos(pi/2) ~ 6e-17.
      const double c1 = a == 1.0 ? 0.0 : std::cos(a * std::numbers::pi / 2);
      const double c0 = a == 1.0 ? 1.0 : std::sin(a * std::numbers::pi / 2);
      k.domain_ = {-inf, inf};
      k.kappa1_ = ScalarField::constant(c1);
      k.kappa0_ = ScalarField::constant(c0);
      k.ratio_primitive_ = [r = c1 / c0](double t) { return r * t; };
      k.inverse_primitive_ = [c0](double t) { return t / c0; };
      break;
    }
    case Family::power: {
      const double w = *omega;
      const double c1 = (1 - a) * std::pow(w, a);
      const double c0 = a * std::pow(w, 1 - a);
      k.domain_ = {-inf, inf};
      k.kappa1_ = ScalarField::constant(c1);
      k.kappa0_ = ScalarField::constant(c0);
      k.ratio_primitive_ = [r = c1 / c0](double t) { return r * t; };
      k.inverse_primitive_ = [c0](double t) { return t / c0; };
      break;
    }
    case Family::time_power: {
      const double w = *omega;
      const auto t = ScalarField::identity();
      k.domain_ = {0.0, inf};
      k.kappa1_ = ((1 - a) * std::pow(w, a)) * pow(t, a);
      k.kappa0_ = (a * std::pow(w, 1 - a)) * pow(t, 1 - a);
      const double cr = (1 - a) / (2 * a * a) * std::pow(w, 2 * a - 1);
      const double ci = 1.0 / (a * a * std::pow(w, 1 - a));
      k.ratio_primitive_ = [cr, a](double s) { return cr * std::pow(s, 2 * a); };
      k.inverse_primitive_ = [ci, a](double s) { return ci * std::pow(s, a); };
      break;
    }
    case Family::custom: break;
  }
  k.kappa0_ = k.kappa0_.relabeled("kappa0");
  k.kappa1_ = k.kappa1_.relabeled("kappa1");
  return k;
}

KappaPair KappaPair::custom(Alpha alpha, ScalarField kappa0, ScalarField kappa1, Domain domain) {
  if (!(domain.lo < domain.hi)) throw InvalidArgument("custom pair domain must satisfy lo < hi");
  KappaPair k;
  k.alpha_ = alpha.value();
  k.family_ = Family::custom;
  k.domain_ = domain;
  k.kappa0_ = std::move(kappa0);
  k.kappa1_ = std::move(kappa1);
  return k;
}

void KappaPair::require_in_domain(double t, const char* what) const {
  if (!domain_.contains(t)) {
    std::ostringstream msg;
    msg << what << " = " << t << " lies outside the gain-pair domain (" << domain_.lo << ", "
        << domain_.hi << ")";
    throw DomainError(msg.str());
  }
}

bool ValidationReport::ok() const {
  if (!violations.empty()) return false;
  for (const auto& s : limits)
    if (!s.ok) return false;
  return true;
}

ValidationReport validate(const KappaPair& pair, const std::vector<double>& grid) {
  if (grid.empty()) throw InvalidArgument("validate: empty grid");
  for (double t : grid) pair.require_in_domain(t, "grid point");

  ValidationReport report;
  for (double t : grid) {
    const double k0 = pair.k0(t), k1 = pair.k1(t);
    if (!std::isfinite(k0) || !std::isfinite(k1)) report.violations.push_back({t, "non-finite gain"});
    else if (!(k0 > 0.0)) report.violations.push_back({t, "kappa0 <= 0"});
    else if (k1 < 0.0) report.violations.push_back({t, "kappa1 < 0"});
  }

  if (pair.family() == Family::custom) {
    report.custom_caveat = true;
    return report;
  }

  report.limits_checked = true;
  const double w = pair.omega().value_or(1.0);
  constexpr double eps = 1e-6;
  for (double alpha : {eps, 1.0 - eps}) {
    const KappaPair probe = KappaPair::make(pair.family(), Alpha(alpha), pair.omega());
    for (double t : grid) {
      const double k0 = probe.k0(t), k1 = probe.k1(t);
      const double scale = pair.family() == Family::trig ? 1.0 : std::max(1.0, w * std::max(1.0, std::abs(t)));
      const double tol = 1e-5 * scale;
      const bool ok = alpha < 0.5 ? (std::abs(k1 - 1.0) < tol && std::abs(k0) < tol)
                                  : (std::abs(k1) < tol && std::abs(k0 - 1.0) < tol);
      report.limits.push_back({alpha, t, k0, k1, ok});
    }
  }
  return report;
}

}  // namespace conform
