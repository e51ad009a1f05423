#include "conform/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "conform/errors.hpp"

namespace conform {

namespace {

struct Channel {
  std::vector<double> y, m;
};

// Solve a tridiagonal system with partial pivoting (LAPACK gtsv scheme).
std::vector<double> solve_tridiagonal(std::vector<double> dl, std::vector<double> d,
                                      std::vector<double> du, std::vector<double> b) {
  const std::size_t n = d.size();
  std::vector<double> du2(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(d[i]) >= std::abs(dl[i])) {
      const double f = dl[i] / d[i];
      d[i + 1] -= f * du[i];
      b[i + 1] -= f * b[i];
      dl[i] = 0.0;
    } else {
      const double f = d[i] / dl[i];
      d[i] = dl[i];
      std::swap(b[i], b[i + 1]);
      b[i + 1] -= f * b[i];
      const double tmp = d[i + 1];
      d[i + 1] = du[i] - f * tmp;
      du[i] = tmp;
      if (i + 2 < n) {
        du2[i] = du[i + 1];
        du[i + 1] = -f * du[i + 1];
      }
    }
  }
  std::vector<double> x(n);
  for (std::size_t k = n; k-- > 0;) {
    double v = b[k];
    if (k + 1 < n) v -= du[k] * x[k + 1];
    if (k + 2 < n) v -= du2[k] * x[k + 2];
    x[k] = v / d[k];
  }
  return x;
}

}  // namespace

std::vector<double> spline_slopes(std::span<const double> t, std::span<const double> y) {
  const std::size_t n = t.size();
  if (n != y.size() || n < 2) throw InvalidArgument("spline_slopes: need >= 2 matching samples");
  std::vector<double> h(n - 1), del(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = t[i + 1] - t[i];
    del[i] = (y[i + 1] - y[i]) / h[i];
  }
  if (n == 2) return {del[0], del[0]};
  if (n == 3) {
    // Derivatives of the interpolating parabola.
    const double c = (del[1] - del[0]) / (h[0] + h[1]);
    return {del[0] - c * h[0], del[0] + c * h[0], del[1] + c * h[1]};
  }
  std::vector<double> dl(n - 1), d(n), du(n - 1), b(n);
  d[0] = h[1];
  du[0] = h[0] + h[1];
  b[0] = ((h[0] + 2 * du[0]) * h[1] * del[0] + h[0] * h[0] * del[1]) / du[0];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    dl[i - 1] = h[i];
    d[i] = 2 * (h[i - 1] + h[i]);
    du[i] = h[i - 1];
    b[i] = 3 * (h[i] * del[i - 1] + h[i - 1] * del[i]);
  }
  const std::size_t last = n - 1;
  const double hl = h[n - 2], hp = h[n - 3];
  dl[last - 1] = hl + hp;
  d[last] = hp;
  b[last] = (hl * hl * del[n - 3] + (2 * (hp + hl) + hl) * hp * del[n - 2]) / (hp + hl);
  return solve_tridiagonal(std::move(dl), std::move(d), std::move(du), std::move(b));
}

struct Trajectory::Data {
  std::vector<double> t;
  Channel x, dax;

  std::size_t segment(double s) const {
    auto it = std::upper_bound(t.begin(), t.end(), s);
    std::ptrdiff_t k = (it - t.begin()) - 1;
    k = std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(t.size()) - 2);
    return static_cast<std::size_t>(k);
  }

  // order 0, 1, 2 derivative of the Hermite interpolant.
  double eval(const Channel& c, double s, int order) const {
    const std::size_t k = segment(s);
    const double h = t[k + 1] - t[k];
    const double u = (s - t[k]) / h;
    const double y0 = c.y[k], y1 = c.y[k + 1], m0 = c.m[k], m1 = c.m[k + 1];
    switch (order) {
      case 0: {
        const double u2 = u * u, u3 = u2 * u;
        return (2 * u3 - 3 * u2 + 1) * y0 + (u3 - 2 * u2 + u) * h * m0 + (-2 * u3 + 3 * u2) * y1 +
               (u3 - u2) * h * m1;
      }
      case 1:
        return (6 * u * u - 6 * u) * (y0 - y1) / h + (3 * u * u - 4 * u + 1) * m0 +
               (3 * u * u - 2 * u) * m1;
      default:
        return ((12 * u - 6) * (y0 - y1) / h + (6 * u - 4) * m0 + (6 * u - 2) * m1) / h;
    }
  }
};

namespace {

void check_lengths(const std::vector<double>& grid, std::size_t n) {
  if (grid.size() < 2) throw InvalidArgument("trajectory needs at least two nodes");
  if (n != grid.size()) throw InvalidArgument("trajectory channels must match the grid length");
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    if (!(grid[i + 1] > grid[i])) throw InvalidArgument("trajectory grid must be strictly increasing");
}

}  // namespace

Trajectory::Trajectory(std::vector<double> grid, std::vector<double> x, std::vector<double> dax) {
  check_lengths(grid, x.size());
  check_lengths(grid, dax.size());
  auto mx = spline_slopes(grid, x);
  auto md = spline_slopes(grid, dax);
  auto d = std::make_shared<Data>();
  d->t = std::move(grid);
  d->x = {std::move(x), std::move(mx)};
  d->dax = {std::move(dax), std::move(md)};
  d_ = std::move(d);
}

Trajectory::Trajectory(std::vector<double> grid, std::vector<double> x, std::vector<double> dax,
                       std::vector<double> x_slope, std::vector<double> dax_slope) {
  check_lengths(grid, x.size());
  check_lengths(grid, dax.size());
  check_lengths(grid, x_slope.size());
  check_lengths(grid, dax_slope.size());
  auto d = std::make_shared<Data>();
  d->t = std::move(grid);
  d->x = {std::move(x), std::move(x_slope)};
  d->dax = {std::move(dax), std::move(dax_slope)};
  d_ = std::move(d);
}

std::size_t Trajectory::size() const noexcept { return d_->t.size(); }
double Trajectory::lo() const noexcept { return d_->t.front(); }
double Trajectory::hi() const noexcept { return d_->t.back(); }
std::span<const double> Trajectory::grid() const noexcept { return d_->t; }
std::span<const double> Trajectory::x() const noexcept { return d_->x.y; }
std::span<const double> Trajectory::dax() const noexcept { return d_->dax.y; }

double Trajectory::x_at(double t) const { return d_->eval(d_->x, t, 0); }
double Trajectory::dax_at(double t) const { return d_->eval(d_->dax, t, 0); }
double Trajectory::x_slope_at(double t) const { return d_->eval(d_->x, t, 1); }
double Trajectory::dax_slope_at(double t) const { return d_->eval(d_->dax, t, 1); }

bool Trajectory::spans(double t) const noexcept {
  const double tol = 1e-9 * std::max(1.0, hi() - lo());
  return t >= lo() - tol && t <= hi() + tol;
}

void Trajectory::require_span(double t) const {
  if (!spans(t)) {
    std::ostringstream msg;
    msg << "t = " << t << " outside trajectory span [" << lo() << ", " << hi() << "]";
    throw DomainError(msg.str());
  }
}

namespace {

ScalarField channel_field(std::shared_ptr<const Trajectory::Data> d, const Channel Trajectory::Data::*c,
                          const char* name) {
  const std::string label = name;
  return ScalarField::lazy(
      [d, c](double t) { return d->eval((*d).*c, t, 0); },
      [d, c, label] {
        return ScalarField::lazy(
            [d, c](double t) { return d->eval((*d).*c, t, 1); },
            [d, c, label] {
              return ScalarField([d, c](double t) { return d->eval((*d).*c, t, 2); }, label + "''");
            },
            label + "'");
      },
      label);
}

}  // namespace

ScalarField Trajectory::x_field() const { return channel_field(d_, &Data::x, "x"); }
ScalarField Trajectory::dax_field() const { return channel_field(d_, &Data::dax, "dax"); }

double Trajectory::max_abs_x() const {
  double m = 0.0;
  for (double v : d_->x.y) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace conform
