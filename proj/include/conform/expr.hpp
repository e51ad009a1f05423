#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "conform/errors.hpp"
#include "conform/field.hpp"

namespace conform {

// Named constants available to expressions besides t and pi.
using SymbolTable = std::map<std::string, double, std::less<>>;

// Tree over numbers, t, + - * / ^ (right-assoc), unary -, parentheses and
// sin cos tan exp log sqrt abs sinh cosh pow.
class Expression {
 public:
  enum class Op { num, var, add, sub, mul, div, pow, neg, sin, cos, tan, exp, log, sqrt, abs, sinh, cosh };

  static Expression number(double v);
  static Expression variable();
  static Expression unary(Op op, Expression a);
  static Expression binary(Op op, Expression a, Expression b);

  double operator()(double t) const;

  Op op() const noexcept;
  bool is_constant() const noexcept;  // no t anywhere
  std::optional<double> constant_value() const noexcept;

  // d/dt by chain, product and quotient rules; empty when a node has no
  // closed rule (abs).
  std::optional<Expression> derivative() const;

  std::string to_string() const;

  // Constants become constant fields; otherwise the derivative channel is
  // symbolic when available and numeric otherwise.
  ScalarField to_field(std::string label = {}) const;

 private:
  struct Node;
  explicit Expression(std::shared_ptr<const Node> n);
  std::shared_ptr<const Node> node_;
};

// Throws ParseError with the byte offset of the problem.
Expression parse_expression(std::string_view text, const SymbolTable& symbols = {});

}  // namespace conform
