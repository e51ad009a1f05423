#include "conform/field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <utility>

namespace conform {

struct ScalarField::Node {
  Fn eval;
  DerivativeFactory factory;
  std::string label;
  std::optional<double> constant;
  mutable std::once_flag once;
  mutable std::shared_ptr<const Node> cached;
};

ScalarField::ScalarField(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

ScalarField::ScalarField() : ScalarField(constant(0.0)) {}

ScalarField::ScalarField(Fn eval, std::string label) {
  auto n = std::make_shared<Node>();
  n->eval = std::move(eval);
  n->label = std::move(label);
  node_ = std::move(n);
}

ScalarField::ScalarField(Fn eval, Fn deriv, std::string label) {
  auto n = std::make_shared<Node>();
  n->eval = std::move(eval);
  std::string dlabel = label + "'";
  n->factory = [d = std::move(deriv), dlabel] { return ScalarField(d, dlabel); };
  n->label = std::move(label);
  node_ = std::move(n);
}

ScalarField ScalarField::lazy(Fn eval, DerivativeFactory derivative, std::string label) {
  auto n = std::make_shared<Node>();
  n->eval = std::move(eval);
  n->factory = std::move(derivative);
  n->label = std::move(label);
  return ScalarField(std::shared_ptr<const Node>(std::move(n)));
}

ScalarField ScalarField::constant(double c) {
  auto n = std::make_shared<Node>();
  n->eval = [c](double) { return c; };
  n->constant = c;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", c);
  n->label = buf;
  return ScalarField(std::shared_ptr<const Node>(std::move(n)));
}

ScalarField ScalarField::identity() {
  return lazy([](double t) { return t; }, [] { return constant(1.0); }, "t");
}

double ScalarField::operator()(double t) const { return node_->eval(t); }

bool ScalarField::has_closed_derivative() const noexcept {
  return node_->constant.has_value() || static_cast<bool>(node_->factory);
}

ScalarField ScalarField::derivative() const {
  if (node_->constant) return constant(0.0);
  std::call_once(node_->once, [this] {
    if (node_->factory) {
      node_->cached = node_->factory().node_;
    } else {
      Fn f = node_->eval;
      node_->cached =
          ScalarField([f](double t) { return numeric_derivative(f, t); }, node_->label + "'")
              .node_;
    }
  });
  return ScalarField(node_->cached);
}

double ScalarField::derivative_at(double t) const {
  if (node_->constant) return 0.0;
  if (!node_->factory) return numeric_derivative(node_->eval, t);
  return derivative()(t);
}

std::optional<double> ScalarField::constant_value() const noexcept { return node_->constant; }

bool ScalarField::is_zero() const noexcept { return node_->constant && *node_->constant == 0.0; }

const std::string& ScalarField::label() const noexcept { return node_->label; }

ScalarField ScalarField::relabeled(std::string label) const {
  if (node_->constant) {
    auto c = constant(*node_->constant);
    auto n = std::make_shared<Node>();
    n->eval = c.node_->eval;
    n->constant = c.node_->constant;
    n->label = std::move(label);
    return ScalarField(std::shared_ptr<const Node>(std::move(n)));
  }
  ScalarField self = *this;
  if (has_closed_derivative())
    return lazy(node_->eval, [self] { return self.derivative(); }, std::move(label));
  return ScalarField(node_->eval, std::move(label));
}

double numeric_derivative(const ScalarField::Fn& f, double t) {
  auto d4 = [&](double h) {
    return (f(t - 2 * h) - 8 * f(t - h) + 8 * f(t + h) - f(t + 2 * h)) / (12 * h);
  };
  const double h = std::max(1e-5, 1e-5 * std::abs(t));
  const double coarse = d4(h);
  const double fine = d4(h / 2);
  return (16 * fine - coarse) / 15;
}

namespace {

bool both_closed(const ScalarField& a, const ScalarField& b) {
  return a.has_closed_derivative() && b.has_closed_derivative();
}

template <class Eval, class Deriv>
ScalarField binary(const ScalarField& a, const ScalarField& b, Eval eval, Deriv deriv,
                   std::string label) {
  ScalarField::Fn fn = [a, b, eval](double t) { return eval(a(t), b(t)); };
  if (both_closed(a, b)) return ScalarField::lazy(fn, [a, b, deriv] { return deriv(a, b); }, label);
  return ScalarField(fn, label);
}

// outer(f) with outer' supplied as a field builder, chain rule applied.
template <class Outer, class OuterPrime>
ScalarField unary(const ScalarField& f, Outer outer, OuterPrime outer_prime, const char* name) {
  if (auto c = f.constant_value()) return ScalarField::constant(outer(*c));
  ScalarField::Fn fn = [f, outer](double t) { return outer(f(t)); };
  std::string label = std::string(name) + "(" + f.label() + ")";
  if (f.has_closed_derivative())
    return ScalarField::lazy(fn, [f, outer_prime] { return outer_prime(f) * f.derivative(); },
                             label);
  return ScalarField(fn, label);
}

}  // namespace

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  auto ca = a.constant_value(), cb = b.constant_value();
  if (ca && cb) return ScalarField::constant(*ca + *cb);
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  return binary(
      a, b, [](double x, double y) { return x + y; },
      [](const ScalarField& x, const ScalarField& y) { return x.derivative() + y.derivative(); },
      "(" + a.label() + "+" + b.label() + ")");
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  auto ca = a.constant_value(), cb = b.constant_value();
  if (ca && cb) return ScalarField::constant(*ca - *cb);
  if (b.is_zero()) return a;
  return binary(
      a, b, [](double x, double y) { return x - y; },
      [](const ScalarField& x, const ScalarField& y) { return x.derivative() - y.derivative(); },
      "(" + a.label() + "-" + b.label() + ")");
}

ScalarField operator*(const ScalarField& a, const ScalarField& b) {
  auto ca = a.constant_value(), cb = b.constant_value();
  if (ca && cb) return ScalarField::constant(*ca * *cb);
  if ((ca && *ca == 0.0) || (cb && *cb == 0.0)) return ScalarField::constant(0.0);
  if (ca && *ca == 1.0) return b;
  if (cb && *cb == 1.0) return a;
  if (ca || cb) {
    const double c = ca ? *ca : *cb;
    const ScalarField& f = ca ? b : a;
    ScalarField::Fn fn = [f, c](double t) { return c * f(t); };
    std::string label = "(" + a.label() + "*" + b.label() + ")";
    if (f.has_closed_derivative())
      return ScalarField::lazy(fn, [f, c] { return c * f.derivative(); }, label);
    return ScalarField(fn, label);
  }
  return binary(
      a, b, [](double x, double y) { return x * y; },
      [](const ScalarField& x, const ScalarField& y) {
        return x.derivative() * y + x * y.derivative();
      },
      "(" + a.label() + "*" + b.label() + ")");
}

ScalarField operator/(const ScalarField& a, const ScalarField& b) {
  auto ca = a.constant_value(), cb = b.constant_value();
  if (ca && cb) return ScalarField::constant(*ca / *cb);
  if (cb) return a * (1.0 / *cb);
  if (ca && *ca == 0.0) return ScalarField::constant(0.0);
  return binary(
      a, b, [](double x, double y) { return x / y; },
      [](const ScalarField& x, const ScalarField& y) {
        return (x.derivative() * y - x * y.derivative()) / (y * y);
      },
      "(" + a.label() + "/" + b.label() + ")");
}

ScalarField operator-(const ScalarField& a) { return a * -1.0; }

ScalarField operator+(const ScalarField& a, double c) { return a + ScalarField::constant(c); }
ScalarField operator+(double c, const ScalarField& a) { return ScalarField::constant(c) + a; }
ScalarField operator-(const ScalarField& a, double c) { return a - ScalarField::constant(c); }
ScalarField operator-(double c, const ScalarField& a) { return ScalarField::constant(c) - a; }
ScalarField operator*(const ScalarField& a, double c) { return a * ScalarField::constant(c); }
ScalarField operator*(double c, const ScalarField& a) { return ScalarField::constant(c) * a; }
ScalarField operator/(const ScalarField& a, double c) { return a / ScalarField::constant(c); }
ScalarField operator/(double c, const ScalarField& a) { return ScalarField::constant(c) / a; }

ScalarField sin(const ScalarField& f) {
  return unary(f, [](double x) { return std::sin(x); },
               [](const ScalarField& g) { return cos(g); }, "sin");
}

ScalarField cos(const ScalarField& f) {
  return unary(f, [](double x) { return std::cos(x); },
               [](const ScalarField& g) { return -sin(g); }, "cos");
}

ScalarField tan(const ScalarField& f) {
  return unary(f, [](double x) { return std::tan(x); },
               [](const ScalarField& g) {
                 auto c = cos(g);
                 return 1.0 / (c * c);
               },
               "tan");
}

ScalarField exp(const ScalarField& f) {
  return unary(f, [](double x) { return std::exp(x); },
               [](const ScalarField& g) { return exp(g); }, "exp");
}

ScalarField log(const ScalarField& f) {
  return unary(f, [](double x) { return std::log(x); },
               [](const ScalarField& g) { return 1.0 / g; }, "log");
}

ScalarField sqrt(const ScalarField& f) {
  return unary(f, [](double x) { return std::sqrt(x); },
               [](const ScalarField& g) { return 0.5 / sqrt(g); }, "sqrt");
}

ScalarField sinh(const ScalarField& f) {
  return unary(f, [](double x) { return std::sinh(x); },
               [](const ScalarField& g) { return cosh(g); }, "sinh");
}

ScalarField cosh(const ScalarField& f) {
  return unary(f, [](double x) { return std::cosh(x); },
               [](const ScalarField& g) { return sinh(g); }, "cosh");
}

ScalarField abs(const ScalarField& f) {
  return unary(f, [](double x) { return std::abs(x); },
               [](const ScalarField& g) {
                 return ScalarField([g](double t) { return g(t) < 0 ? -1.0 : 1.0; }, "sgn");
               },
               "abs");
}

ScalarField pow(const ScalarField& f, double e) {
  if (e == 0.0) return ScalarField::constant(1.0);
  if (e == 1.0) return f;
  return unary(f, [e](double x) { return std::pow(x, e); },
               [e](const ScalarField& g) { return e * pow(g, e - 1.0); }, "pow");
}

ScalarField pow(const ScalarField& f, const ScalarField& g) {
  if (auto c = g.constant_value()) return pow(f, *c);
  return binary(
      f, g, [](double x, double y) { return std::pow(x, y); },
      [](const ScalarField& x, const ScalarField& y) {
        return pow(x, y) * (y.derivative() * log(x) + y * x.derivative() / x);
      },
      "pow(" + f.label() + "," + g.label() + ")");
}

}  // namespace conform
