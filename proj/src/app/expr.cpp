#include "conform/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <utility>

namespace conform {

struct Expression::Node {
  Op op;
  double value = 0.0;
  std::shared_ptr<const Node> a, b;
  bool constant = true;
};

namespace {

using Op = Expression::Op;

double apply(Op op, double x, double y) {
  switch (op) {
    case Op::add: return x + y;
    case Op::sub: return x - y;
    case Op::mul: return x * y;
    case Op::div: return x / y;
    case Op::pow: return std::pow(x, y);
    case Op::neg: return -x;
    case Op::sin: return std::sin(x);
    case Op::cos: return std::cos(x);
    case Op::tan: return std::tan(x);
    case Op::exp: return std::exp(x);
    case Op::log: return std::log(x);
    case Op::sqrt: return std::sqrt(x);
    case Op::abs: return std::abs(x);
    case Op::sinh: return std::sinh(x);
    case Op::cosh: return std::cosh(x);
    default: return x;
  }
}

const char* name_of(Op op) {
  switch (op) {
    case Op::sin: return "sin";
    case Op::cos: return "cos";
    case Op::tan: return "tan";
    case Op::exp: return "exp";
    case Op::log: return "log";
    case Op::sqrt: return "sqrt";
    case Op::abs: return "abs";
    case Op::sinh: return "sinh";
    case Op::cosh: return "cosh";
    default: return "?";
  }
}

struct FunctionName {
  std::string_view name;
  Op op;
};

constexpr FunctionName kFunctions[] = {{"sin", Op::sin},   {"cos", Op::cos},   {"tan", Op::tan},
                                       {"exp", Op::exp},   {"log", Op::log},   {"sqrt", Op::sqrt},
                                       {"abs", Op::abs},   {"sinh", Op::sinh}, {"cosh", Op::cosh}};

bool is_num(const Expression& e, double v) {
  auto c = e.constant_value();
  return c && *c == v;
}

}  // namespace

Expression::Expression(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

Expression Expression::number(double v) {
  auto n = std::make_shared<Node>();
  n->op = Op::num;
  n->value = v;
  return Expression(n);
}

Expression Expression::variable() {
  auto n = std::make_shared<Node>();
  n->op = Op::var;
  n->constant = false;
  return Expression(n);
}

Expression Expression::unary(Op op, Expression a) {
  if (auto c = a.constant_value()) return number(apply(op, *c, 0.0));
  if (op == Op::neg && a.op() == Op::neg) return Expression(a.node_->a);
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = a.node_;
  n->constant = false;
  return Expression(n);
}

Expression Expression::binary(Op op, Expression a, Expression b) {
  auto ca = a.constant_value(), cb = b.constant_value();
  if (ca && cb) return number(apply(op, *ca, *cb));
  switch (op) {
    case Op::add:
      if (is_num(a, 0.0)) return b;
      if (is_num(b, 0.0)) return a;
      break;
    case Op::sub:
      if (is_num(b, 0.0)) return a;
      if (is_num(a, 0.0)) return unary(Op::neg, b);
      break;
    case Op::mul:
      if (is_num(a, 0.0) || is_num(b, 0.0)) return number(0.0);
      if (is_num(a, 1.0)) return b;
      if (is_num(b, 1.0)) return a;
      break;
    case Op::div:
      if (is_num(b, 1.0)) return a;
      if (is_num(a, 0.0)) return number(0.0);
      break;
    case Op::pow:
      if (is_num(b, 1.0)) return a;
      if (is_num(b, 0.0)) return number(1.0);
      break;
    default: break;
  }
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = a.node_;
  n->b = b.node_;
  n->constant = false;
  return Expression(n);
}

double Expression::operator()(double t) const {
  const Node& n = *node_;
  switch (n.op) {
    case Op::num: return n.value;
    case Op::var: return t;
    case Op::add:
    case Op::sub:
    case Op::mul:
    case Op::div:
    case Op::pow: return apply(n.op, Expression(n.a)(t), Expression(n.b)(t));
    default: return apply(n.op, Expression(n.a)(t), 0.0);
  }
}

Expression::Op Expression::op() const noexcept { return node_->op; }

bool Expression::is_constant() const noexcept { return node_->constant; }

std::optional<double> Expression::constant_value() const noexcept {
  if (node_->op == Op::num) return node_->value;
  return std::nullopt;
}

std::optional<Expression> Expression::derivative() const {
  const Node& n = *node_;
  if (n.constant) return number(0.0);
  if (n.op == Op::var) return number(1.0);
  Expression a(n.a);
  auto da = a.derivative();
  if (!da) return std::nullopt;
  auto B = [](Op op, Expression x, Expression y) { return binary(op, std::move(x), std::move(y)); };
  auto U = [](Op op, Expression x) { return unary(op, std::move(x)); };
  switch (n.op) {
    case Op::neg: return U(Op::neg, *da);
    case Op::sin: return B(Op::mul, U(Op::cos, a), *da);
    case Op::cos: return U(Op::neg, B(Op::mul, U(Op::sin, a), *da));
    case Op::tan: return B(Op::div, *da, B(Op::pow, U(Op::cos, a), number(2.0)));
    case Op::exp: return B(Op::mul, U(Op::exp, a), *da);
    case Op::log: return B(Op::div, *da, a);
    case Op::sqrt: return B(Op::div, *da, B(Op::mul, number(2.0), U(Op::sqrt, a)));
    case Op::sinh: return B(Op::mul, U(Op::cosh, a), *da);
    case Op::cosh: return B(Op::mul, U(Op::sinh, a), *da);
    case Op::abs: return std::nullopt;
    default: break;
  }
  Expression b(n.b);
  auto db = b.derivative();
  if (!db) return std::nullopt;
  switch (n.op) {
    case Op::add: return B(Op::add, *da, *db);
    case Op::sub: return B(Op::sub, *da, *db);
    case Op::mul: return B(Op::add, B(Op::mul, *da, b), B(Op::mul, a, *db));
    case Op::div:
      if (b.is_constant()) return B(Op::div, *da, b);
      return B(Op::div, B(Op::sub, B(Op::mul, *da, b), B(Op::mul, a, *db)), B(Op::pow, b, number(2.0)));
    case Op::pow:
      if (auto c = b.constant_value())
        return B(Op::mul, B(Op::mul, number(*c), B(Op::pow, a, number(*c - 1.0))), *da);
      return B(Op::mul, *this,
               B(Op::add, B(Op::mul, *db, U(Op::log, a)), B(Op::div, B(Op::mul, b, *da), a)));
    default: return std::nullopt;
  }
}

std::string Expression::to_string() const {
  const Node& n = *node_;
  switch (n.op) {
    case Op::num: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      return n.value < 0 ? "(" + std::string(buf) + ")" : buf;
    }
    case Op::var: return "t";
    case Op::neg: return "(-" + Expression(n.a).to_string() + ")";
    case Op::add:
    case Op::sub:
    case Op::mul:
    case Op::div:
    case Op::pow: {
      const char sym[] = {'+', '-', '*', '/', '^'};
      const char c = sym[static_cast<int>(n.op) - static_cast<int>(Op::add)];
      return "(" + Expression(n.a).to_string() + c + Expression(n.b).to_string() + ")";
    }
    default: return std::string(name_of(n.op)) + "(" + Expression(n.a).to_string() + ")";
  }
}

ScalarField Expression::to_field(std::string label) const {
  if (label.empty()) label = to_string();
  if (auto c = constant_value()) return ScalarField::constant(*c).relabeled(std::move(label));
  Expression self = *this;
  auto eval = [self](double t) { return self(t); };
  auto d = derivative();
  if (!d) return ScalarField(eval, std::move(label));
  Expression dd = *d;
  return ScalarField::lazy(eval, [dd] { return dd.to_field(); }, std::move(label));
}

namespace {

class Parser {
 public:
  Parser(std::string_view text, const SymbolTable& symbols) : s_(text), symbols_(symbols) {}

  Expression parse() {
    skip();
    if (pos_ == s_.size()) throw ParseError("empty expression", pos_);
    Expression e = expr();
    skip();
    if (pos_ != s_.size()) throw ParseError(std::string("unexpected '") + s_[pos_] + "'", pos_);
    return e;
  }

 private:
  std::string_view s_;
  const SymbolTable& symbols_;
  std::size_t pos_ = 0;

  void skip() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ == s_.size()) throw ParseError(std::string("expected '") + c + "' before end of input", pos_);
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
  }

  Expression expr() {
    Expression e = term();
    for (;;) {
      if (accept('+'))
        e = Expression::binary(Op::add, e, term());
      else if (accept('-'))
        e = Expression::binary(Op::sub, e, term());
      else
        return e;
    }
  }

  Expression term() {
    Expression e = unary();
    for (;;) {
      if (accept('*'))
        e = Expression::binary(Op::mul, e, unary());
      else if (accept('/'))
        e = Expression::binary(Op::div, e, unary());
      else
        return e;
    }
  }

  Expression unary() {
    if (accept('-')) return Expression::unary(Op::neg, unary());
    return power();
  }

  Expression power() {
    Expression base = primary();
    if (accept('^')) return Expression::binary(Op::pow, base, unary());
    return base;
  }

  Expression primary() {
    skip();
    if (pos_ == s_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expression e = expr();
      expect(')');
      return e;
    }
    if ((c >= '0' && c <= '9') || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  Expression number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < s_.size() && s_[pos_] >= '0' && s_[pos_] <= '9') ++pos_, ++n;
      return n;
    };
    std::size_t n = digits();
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      n += digits();
    }
    if (n == 0) throw ParseError("malformed number", start);
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (digits() == 0) pos_ = save;
    }
    double v = 0.0;
    auto r = std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (r.ec != std::errc() || !std::isfinite(v)) throw ParseError("number out of range", start);
    return Expression::number(v);
  }

  Expression identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    const std::string_view id = s_.substr(start, pos_ - start);
    skip();
    if (pos_ < s_.size() && s_[pos_] == '(') {
      ++pos_;
      if (id == "pow") {
        Expression a = expr();
        expect(',');
        Expression b = expr();
        expect(')');
        return Expression::binary(Op::pow, a, b);
      }
      for (const auto& f : kFunctions)
        if (f.name == id) {
          Expression a = expr();
          expect(')');
          return Expression::unary(f.op, a);
        }
      throw ParseError("unknown function '" + std::string(id) + "'", start);
    }
    if (id == "t") return Expression::variable();
    if (id == "pi") return Expression::number(std::numbers::pi);
    if (auto it = symbols_.find(id); it != symbols_.end()) return Expression::number(it->second);
    throw ParseError("unknown identifier '" + std::string(id) + "'", start);
  }
};

}  // namespace

Expression parse_expression(std::string_view text, const SymbolTable& symbols) {
  return Parser(text, symbols).parse();
}

}  // namespace conform
