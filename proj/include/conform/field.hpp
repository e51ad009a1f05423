#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace conform {

// Real function of t with an optional closed-form classical derivative.
//
// Derivatives are themselves ScalarFields, so closed forms compose through
// arithmetic: (f*g)' is built from f' and g' when both are closed. A field
// without a closed derivative is differentiated numerically.
class ScalarField {
 public:
  using Fn = std::function<double(double)>;
  using DerivativeFactory = std::function<ScalarField()>;

  ScalarField();  // the zero constant
  explicit ScalarField(Fn eval, std::string label = "f");
  ScalarField(Fn eval, Fn deriv, std::string label = "f");

  // Derivative built on first use and cached. The factory must not capture
  // the field being constructed.
  static ScalarField lazy(Fn eval, DerivativeFactory derivative, std::string label);
  static ScalarField constant(double c);
  static ScalarField identity();

  double operator()(double t) const;

  bool has_closed_derivative() const noexcept;
  ScalarField derivative() const;
  double derivative_at(double t) const;

  std::optional<double> constant_value() const noexcept;
  bool is_zero() const noexcept;
  const std::string& label() const noexcept;
  ScalarField relabeled(std::string label) const;

 private:
  struct Node;
  explicit ScalarField(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

// 4th-order central difference, h = max(1e-5, 1e-5|t|), one Richardson step.
double numeric_derivative(const ScalarField::Fn& f, double t);

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(const ScalarField& a, const ScalarField& b);
ScalarField operator/(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a);

ScalarField operator+(const ScalarField& a, double c);
ScalarField operator+(double c, const ScalarField& a);
ScalarField operator-(const ScalarField& a, double c);
ScalarField operator-(double c, const ScalarField& a);
ScalarField operator*(const ScalarField& a, double c);
ScalarField operator*(double c, const ScalarField& a);
ScalarField operator/(const ScalarField& a, double c);
ScalarField operator/(double c, const ScalarField& a);

ScalarField sin(const ScalarField& f);
ScalarField cos(const ScalarField& f);
ScalarField tan(const ScalarField& f);
ScalarField exp(const ScalarField& f);
ScalarField log(const ScalarField& f);
ScalarField sqrt(const ScalarField& f);
ScalarField sinh(const ScalarField& f);
ScalarField cosh(const ScalarField& f);
ScalarField abs(const ScalarField& f);
ScalarField pow(const ScalarField& f, double e);
ScalarField pow(const ScalarField& f, const ScalarField& g);

}  // namespace conform
