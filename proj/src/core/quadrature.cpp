#include "conform/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

#include "conform/errors.hpp"

namespace conform {

namespace {

// QUADPACK qk21 abscissae and weights.
constexpr double kXgk[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
constexpr double kWgk[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208938229755, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
constexpr double kWg[5] = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Panel {
  double a, b, value, error;
  int depth;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel qk21(const Integrand& f, double a, double b, int depth) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(centre);
  double resg = 0.0;
  double resk = kWgk[10] * fc;
  double fv1[10], fv2[10];
  for (int j = 0; j < 5; ++j) {
    const int k = 2 * j + 1;
    const double dx = half * kXgk[k];
    fv1[k] = f(centre - dx);
    fv2[k] = f(centre + dx);
    resg += kWg[j] * (fv1[k] + fv2[k]);
    resk += kWgk[k] * (fv1[k] + fv2[k]);
  }
  for (int j = 0; j < 5; ++j) {
    const int k = 2 * j;
    const double dx = half * kXgk[k];
    fv1[k] = f(centre - dx);
    fv2[k] = f(centre + dx);
    resk += kWgk[k] * (fv1[k] + fv2[k]);
  }
  const double reskh = 0.5 * resk;
  double resabs = kWgk[10] * std::abs(fc);
  double resasc = kWgk[10] * std::abs(fc - reskh);
  for (int k = 0; k < 10; ++k) {
    resabs += kWgk[k] * (std::abs(fv1[k]) + std::abs(fv2[k]));
    resasc += kWgk[k] * (std::abs(fv1[k] - reskh) + std::abs(fv2[k] - reskh));
  }
  const double ah = std::abs(half);
  resabs *= ah;
  resasc *= ah;
  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50 * eps)) err = std::max(50 * eps * resabs, err);
  const double value = resk * half;
  if (!std::isfinite(value)) {
    std::ostringstream msg;
    msg << "non-finite integrand on [" << a << ", " << b << "]";
    throw QuadratureError(msg.str());
  }
  return {a, b, value, err, depth};
}

QuadratureResult adapt(const Integrand& f, std::vector<double> cuts, const QuadratureConfig& cfg) {
  std::priority_queue<Panel> heap;
  QuadratureResult out;
  double total = 0.0, error = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] == cuts[i]) continue;
    Panel p = qk21(f, cuts[i], cuts[i + 1], 0);
    out.evaluations += 21;
    total += p.value;
    error += p.error;
    heap.push(p);
  }
  constexpr std::size_t kMaxPanels = 50000;
  while (!heap.empty() && error > std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total))) {
    Panel worst = heap.top();
    if (worst.depth >= cfg.max_depth || heap.size() > kMaxPanels) {
      std::ostringstream msg;
      msg << "quadrature did not converge: error estimate " << error << " on ["
          << cuts.front() << ", " << cuts.back() << "] after bisection depth " << worst.depth;
      throw QuadratureError(msg.str());
    }
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    Panel left = qk21(f, worst.a, mid, worst.depth + 1);
    Panel right = qk21(f, mid, worst.b, worst.depth + 1);
    out.evaluations += 42;
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to shed the drift of incremental updates.
  total = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  out.value = total;
  out.error = error;
  return out;
}

}  // namespace

void QuadratureConfig::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw InvalidArgument("quadrature tolerances must be > 0");
  if (max_depth <= 0) throw InvalidArgument("quadrature max_depth must be positive");
}

QuadratureResult integrate(const Integrand& f, double a, double b, const QuadratureConfig& cfg) {
  return integrate(f, a, b, {}, cfg);
}

QuadratureResult integrate(const Integrand& f, double a, double b,
                           std::span<const double> breakpoints, const QuadratureConfig& cfg) {
  if (!std::isfinite(a) || !std::isfinite(b)) throw InvalidArgument("non-finite integration limits");
  if (a == b) return {};
  const double lo = std::min(a, b), hi = std::max(a, b);
  std::vector<double> cuts{lo};
  for (double c : breakpoints)
    if (c > lo && c < hi) cuts.push_back(c);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  QuadratureResult r = adapt(f, std::move(cuts), cfg);
  if (b < a) r.value = -r.value;
  return r;
}

double integral(const Integrand& f, double a, double b, const QuadratureConfig& cfg) {
  return integrate(f, a, b, cfg).value;
}

std::vector<double> cumulative_integral(const Integrand& f, std::span<const double> grid, double origin,
                                        const QuadratureConfig& cfg) {
  const std::size_t n = grid.size();
  std::vector<double> out(n, 0.0);
  if (n == 0) return out;
  // k = last node <= origin (or 0 when origin precedes the grid)
  std::size_t k = static_cast<std::size_t>(std::upper_bound(grid.begin(), grid.end(), origin) - grid.begin());
  k = k == 0 ? 0 : k - 1;
  out[k] = integral(f, origin, grid[k], cfg);
  for (std::size_t i = k + 1; i < n; ++i) out[i] = out[i - 1] + integral(f, grid[i - 1], grid[i], cfg);
  for (std::size_t i = k; i-- > 0;) out[i] = out[i + 1] - integral(f, grid[i], grid[i + 1], cfg);
  return out;
}

Antiderivative::Antiderivative(Integrand f, double lo, double hi, double origin,
                               std::size_t panels, const QuadratureConfig& cfg)
    : f_(std::move(f)), lo_(lo), hi_(hi), cfg_(cfg) {
  if (!(hi > lo)) throw InvalidArgument("antiderivative needs lo < hi");
  panels = std::max<std::size_t>(panels, 1);
  step_ = (hi - lo) / static_cast<double>(panels);
  cumulative_.assign(panels + 1, 0.0);
  for (std::size_t k = 0; k < panels; ++k) {
    const double a = lo + step_ * static_cast<double>(k);
    const double b = k + 1 == panels ? hi : lo + step_ * static_cast<double>(k + 1);
    cumulative_[k + 1] = cumulative_[k] + integral(f_, a, b, cfg_);
  }
  offset_ = 0.0;
  offset_ = (*this)(origin);
}

double Antiderivative::operator()(double t) const {
  const double pos = (t - lo_) / step_;
  long k = std::lround(pos);
  k = std::clamp<long>(k, 0, static_cast<long>(cumulative_.size()) - 1);
  const double node = k + 1 == static_cast<long>(cumulative_.size()) ? hi_ : lo_ + step_ * k;
  return cumulative_[static_cast<std::size_t>(k)] + integral(f_, node, t, cfg_) - offset_;
}

}  // namespace conform
