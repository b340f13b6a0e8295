#include "qsturm/expr.hpp"

#include "qsturm/errors.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

namespace qsturm {

struct Expr::Node {
  Op op = Op::Const;
  double value = 0.0;
  Var var = Var::X;
  std::vector<Expr> children;
};

std::size_t arity(Op op) {
  switch (op) {
    case Op::Const:
    case Op::Variable:
      return 0;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div:
      return 2;
    default:
      return 1;  // unary functions and Pow (exponent is stored as a value)
  }
}

std::string_view op_name(Op op) {
  switch (op) {
    case Op::Const: return "const";
    case Op::Variable: return "var";
    case Op::Neg: return "neg";
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Tan: return "tan";
    case Op::Exp: return "exp";
    case Op::Ln: return "ln";
    case Op::Tanh: return "tanh";
    case Op::Abs: return "abs";
    case Op::Sqrt: return "sqrt";
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Div: return "/";
    case Op::Pow: return "^";
  }
  return "?";
}

namespace {

std::optional<Op> function_op(std::string_view name) {
  static const std::array<std::pair<std::string_view, Op>, 8> table{{
      {"sin", Op::Sin},
      {"cos", Op::Cos},
      {"tan", Op::Tan},
      {"exp", Op::Exp},
      {"ln", Op::Ln},
      {"tanh", Op::Tanh},
      {"abs", Op::Abs},
      {"sqrt", Op::Sqrt},
  }};
  for (const auto& [n, op] : table)
    if (n == name) return op;
  return std::nullopt;
}

}  // namespace

Expr::Expr() : node_(std::make_shared<Node>()) {}

Expr Expr::constant(double value) {
  auto n = std::make_shared<Node>();
  n->op = Op::Const;
  n->value = value;
  return Expr(std::move(n));
}

Expr Expr::variable(Var v) {
  auto n = std::make_shared<Node>();
  n->op = Op::Variable;
  n->var = v;
  return Expr(std::move(n));
}

Expr Expr::unary(Op op, Expr arg) {
  if (arity(op) != 1 || op == Op::Pow) throw ArityError("operator is not unary");
  auto n = std::make_shared<Node>();
  n->op = op;
  n->children.push_back(std::move(arg));
  return Expr(std::move(n));
}

Expr Expr::binary(Op op, Expr lhs, Expr rhs) {
  if (arity(op) != 2) throw ArityError("operator is not binary");
  auto n = std::make_shared<Node>();
  n->op = op;
  n->children.push_back(std::move(lhs));
  n->children.push_back(std::move(rhs));
  return Expr(std::move(n));
}

Expr Expr::power(Expr base, double exponent) {
  auto n = std::make_shared<Node>();
  n->op = Op::Pow;
  n->value = exponent;
  n->children.push_back(std::move(base));
  return Expr(std::move(n));
}

Op Expr::op() const { return node_->op; }
double Expr::value() const { return node_->value; }
Var Expr::var() const { return node_->var; }
const Expr& Expr::child(std::size_t i) const { return node_->children.at(i); }

// ------------------------------------------------------------------ parser

namespace {

class Parser {
public:
  Parser(std::string_view text, const ParameterMap& params) : text_(text), params_(params) {}

  Expr run() {
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) throw SyntaxError("unexpected '" + std::string(1, text_[pos_]) + "'", pos_);
    if (unknown_) throw UnknownIdentifier(unknown_->first, unknown_->second);
    return e;
  }

private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) throw SyntaxError(std::string("expected '") + c + "'", pos_);
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  Expr parse_expr() {
    Expr lhs = parse_term();
    for (;;) {
      if (accept('+'))
        lhs = Expr::binary(Op::Add, lhs, parse_term());
      else if (accept('-'))
        lhs = Expr::binary(Op::Sub, lhs, parse_term());
      else
        return lhs;
    }
  }

  Expr parse_term() {
    Expr lhs = parse_unary();
    for (;;) {
      if (accept('*'))
        lhs = Expr::binary(Op::Mul, lhs, parse_unary());
      else if (accept('/'))
        lhs = Expr::binary(Op::Div, lhs, parse_unary());
      else
        return lhs;
    }
  }

  Expr parse_unary() {
    if (accept('+')) return parse_unary();
    if (accept('-')) {
      if (pos_ < text_.size() && starts_number(text_[pos_])) {
        std::size_t save = pos_;
        double v = parse_number();
        if (peek() != '^') return Expr::constant(-v);
        pos_ = save;
      }
      return Expr::unary(Op::Neg, parse_unary());
    }
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (!accept('^')) return base;
    std::size_t at = pos_;
    Expr exponent = parse_unary();
    if (depends_on(exponent, Var::X) || depends_on(exponent, Var::U) || depends_on(exponent, Var::P))
      throw SyntaxError("exponent must be constant", at);
    double value = 0.0;
    try {
      value = eval(exponent, 0.0, 0.0, 0.0);
    } catch (const DomainError&) {
      throw SyntaxError("exponent does not evaluate to a finite constant", at);
    }
    return Expr::power(base, value);
  }

  static bool starts_number(char c) { return std::isdigit(static_cast<unsigned char>(c)) || c == '.'; }

  double parse_number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
      ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t mark = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      } else {
        pos_ = mark;  // "2e" is not an exponent; let the caller see 'e'
      }
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (ec != std::errc() || ptr != text_.data() + pos_) throw SyntaxError("malformed number", start);
    return v;
  }

  Expr parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) throw SyntaxError("unexpected end of input", pos_);
    char c = text_[pos_];
    if (starts_number(c)) return Expr::constant(parse_number());
    if (c == '(') {
      ++pos_;
      Expr e = parse_expr();
      expect(')');
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      std::string_view name = text_.substr(start, pos_ - start);
      return identifier(name, start);
    }
    throw SyntaxError("unexpected '" + std::string(1, c) + "'", pos_);
  }

  Expr identifier(std::string_view name, std::size_t start) {
    if (auto fn = function_op(name)) {
      if (!accept('(')) throw ArityError("function '" + std::string(name) + "' needs one argument");
      if (peek() == ')') throw ArityError("function '" + std::string(name) + "' needs one argument");
      Expr arg = parse_expr();
      if (peek() == ',') throw ArityError("function '" + std::string(name) + "' takes one argument");
      expect(')');
      return Expr::unary(*fn, arg);
    }
    if (name == "x") return Expr::variable(Var::X);
    if (name == "u") return Expr::variable(Var::U);
    if (name == "p") return Expr::variable(Var::P);
    if (name == "pi") return Expr::constant(std::numbers::pi);
    if (auto it = params_.find(name); it != params_.end()) return Expr::constant(it->second);
    if (!unknown_) unknown_.emplace(std::string(name), start);
    if (peek() == '(') {
      // unknown function: consume the call so syntax checking can continue
      accept('(');
      parse_expr();
      expect(')');
    }
    return Expr::constant(0.0);
  }

  std::string_view text_;
  const ParameterMap& params_;
  std::size_t pos_ = 0;
  std::optional<std::pair<std::string, std::size_t>> unknown_;
};

}  // namespace

Expr parse(std::string_view text, const ParameterMap& params) { return Parser(text, params).run(); }

// ------------------------------------------------------------------ printing

namespace {

std::string format_number(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), std::fabs(v));
  std::string s(buf.data(), ptr);
  return std::signbit(v) ? "(-" + s + ")" : s;
}

void print(const Expr& e, std::string& out) {
  switch (e.op()) {
    case Op::Const:
      out += format_number(e.value());
      return;
    case Op::Variable:
      out += e.var() == Var::X ? "x" : e.var() == Var::U ? "u" : "p";
      return;
    case Op::Neg:
      out += "-(";
      print(e.child(0), out);
      out += ")";
      return;
    case Op::Pow:
      out += "(";
      print(e.child(0), out);
      out += ")^";
      out += format_number(e.value());
      return;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div:
      out += "(";
      print(e.child(0), out);
      out += " ";
      out += op_name(e.op());
      out += " ";
      print(e.child(1), out);
      out += ")";
      return;
    default:
      out += op_name(e.op());
      out += "(";
      print(e.child(0), out);
      out += ")";
      return;
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  print(e, out);
  return out;
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.op() != b.op()) return false;
  switch (a.op()) {
    case Op::Const:
      return a.value() == b.value();
    case Op::Variable:
      return a.var() == b.var();
    case Op::Pow:
      return a.value() == b.value() && structurally_equal(a.child(0), b.child(0));
    default:
      for (std::size_t i = 0; i < arity(a.op()); ++i)
        if (!structurally_equal(a.child(i), b.child(i))) return false;
      return true;
  }
}

bool depends_on(const Expr& e, Var v) {
  if (e.op() == Op::Const) return false;
  if (e.op() == Op::Variable) return e.var() == v;
  for (std::size_t i = 0; i < arity(e.op()); ++i)
    if (depends_on(e.child(i), v)) return true;
  return false;
}

std::size_t depth(const Expr& e) {
  std::size_t d = 0;
  for (std::size_t i = 0; i < arity(e.op()); ++i) d = std::max(d, depth(e.child(i)));
  return d + 1;
}

// ------------------------------------------------------------------ evaluation

namespace {

double checked(double v, Op op) {
  if (!std::isfinite(v)) throw DomainError("non-finite result in " + std::string(op_name(op)));
  return v;
}

}  // namespace

double eval(const Expr& e, double x, double u, double p) {
  switch (e.op()) {
    case Op::Const:
      return e.value();
    case Op::Variable:
      return e.var() == Var::X ? x : e.var() == Var::U ? u : p;
    default:
      break;
  }
  const double a = eval(e.child(0), x, u, p);
  switch (e.op()) {
    case Op::Neg: return -a;
    case Op::Sin: return std::sin(a);
    case Op::Cos: return std::cos(a);
    case Op::Tan: return checked(std::tan(a), Op::Tan);
    case Op::Exp: return checked(std::exp(a), Op::Exp);
    case Op::Ln:
      if (a <= 0.0) throw DomainError("ln of non-positive value");
      return std::log(a);
    case Op::Tanh: return std::tanh(a);
    case Op::Abs: return std::fabs(a);
    case Op::Sqrt:
      if (a < 0.0) throw DomainError("sqrt of negative value");
      return std::sqrt(a);
    case Op::Pow: return checked(std::pow(a, e.value()), Op::Pow);
    default: break;
  }
  const double b = eval(e.child(1), x, u, p);
  switch (e.op()) {
    case Op::Add: return checked(a + b, Op::Add);
    case Op::Sub: return checked(a - b, Op::Sub);
    case Op::Mul: return checked(a * b, Op::Mul);
    case Op::Div:
      if (b == 0.0) throw DomainError("division by zero");
      return checked(a / b, Op::Div);
    default: break;
  }
  throw DomainError("malformed expression node");
}

namespace {

const Eigen::ArrayXd& checked(const Eigen::ArrayXd& v, Op op) {
  if (!v.allFinite()) throw DomainError("non-finite result in " + std::string(op_name(op)));
  return v;
}

}  // namespace

Eigen::ArrayXd eval(const Expr& e, const Eigen::ArrayXd& x, const Eigen::ArrayXd& u,
                    const Eigen::ArrayXd& p) {
  const Eigen::Index n = u.size();
  switch (e.op()) {
    case Op::Const:
      return Eigen::ArrayXd::Constant(n, e.value());
    case Op::Variable:
      return e.var() == Var::X ? x : e.var() == Var::U ? u : p;
    default:
      break;
  }
  Eigen::ArrayXd a = eval(e.child(0), x, u, p);
  switch (e.op()) {
    case Op::Neg: return -a;
    case Op::Sin: return a.sin();
    case Op::Cos: return a.cos();
    case Op::Tan: return checked(a.tan(), Op::Tan);
    case Op::Exp: return checked(a.exp(), Op::Exp);
    case Op::Ln:
      if ((a <= 0.0).any()) throw DomainError("ln of non-positive value");
      return a.log();
    case Op::Tanh: return a.tanh();
    case Op::Abs: return a.abs();
    case Op::Sqrt:
      if ((a < 0.0).any()) throw DomainError("sqrt of negative value");
      return a.sqrt();
    case Op::Pow:
      if (e.value() == 2.0) return a.square();
      return checked(a.pow(e.value()), Op::Pow);
    default: break;
  }
  Eigen::ArrayXd b = eval(e.child(1), x, u, p);
  switch (e.op()) {
    case Op::Add: return checked(a + b, Op::Add);
    case Op::Sub: return checked(a - b, Op::Sub);
    case Op::Mul: return checked(a * b, Op::Mul);
    case Op::Div:
      if ((b == 0.0).any()) throw DomainError("division by zero");
      return checked(a / b, Op::Div);
    default: break;
  }
  throw DomainError("malformed expression node");
}

// ------------------------------------------------------------------ differentiation

namespace {

std::optional<double> try_fold(const Expr& e) {
  try {
    double v = eval(e, 0.0, 0.0, 0.0);
    return v;
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

Expr fold_or_keep(Expr e) {
  if (auto v = try_fold(e)) return Expr::constant(*v);
  return e;
}

Expr neg(const Expr& a) {
  if (a.is_constant()) return Expr::constant(-a.value());
  return Expr::unary(Op::Neg, a);
}

Expr add(const Expr& a, const Expr& b) {
  if (a.is_constant(0.0)) return b;
  if (b.is_constant(0.0)) return a;
  if (a.is_constant() && b.is_constant()) return fold_or_keep(Expr::binary(Op::Add, a, b));
  return Expr::binary(Op::Add, a, b);
}

Expr sub(const Expr& a, const Expr& b) {
  if (b.is_constant(0.0)) return a;
  if (a.is_constant(0.0)) return neg(b);
  if (a.is_constant() && b.is_constant()) return fold_or_keep(Expr::binary(Op::Sub, a, b));
  return Expr::binary(Op::Sub, a, b);
}

Expr mul(const Expr& a, const Expr& b) {
  if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr::constant(0.0);
  if (a.is_constant(1.0)) return b;
  if (b.is_constant(1.0)) return a;
  if (a.is_constant() && b.is_constant()) return fold_or_keep(Expr::binary(Op::Mul, a, b));
  return Expr::binary(Op::Mul, a, b);
}

Expr div(const Expr& a, const Expr& b) {
  if (a.is_constant(0.0)) return Expr::constant(0.0);
  if (b.is_constant(1.0)) return a;
  if (a.is_constant() && b.is_constant()) return fold_or_keep(Expr::binary(Op::Div, a, b));
  return Expr::binary(Op::Div, a, b);
}

Expr pow(const Expr& base, double exponent) {
  if (exponent == 1.0) return base;
  if (exponent == 0.0) return Expr::constant(1.0);
  Expr e = Expr::power(base, exponent);
  return base.is_constant() ? fold_or_keep(e) : e;
}

Expr fn(Op op, const Expr& arg) {
  Expr e = Expr::unary(op, arg);
  return arg.is_constant() ? fold_or_keep(e) : e;
}

}  // namespace

Expr differentiate(const Expr& e, Var v) {
  if (!depends_on(e, v)) return Expr::constant(0.0);
  switch (e.op()) {
    case Op::Const: return Expr::constant(0.0);
    case Op::Variable: return Expr::constant(e.var() == v ? 1.0 : 0.0);
    default: break;
  }
  const Expr& g = e.child(0);
  const Expr dg = differentiate(g, v);
  switch (e.op()) {
    case Op::Neg: return neg(dg);
    case Op::Sin: return mul(fn(Op::Cos, g), dg);
    case Op::Cos: return mul(neg(fn(Op::Sin, g)), dg);
    case Op::Tan: return div(dg, pow(fn(Op::Cos, g), 2.0));
    case Op::Exp: return mul(e, dg);
    case Op::Ln: return div(dg, g);
    case Op::Tanh: return mul(sub(Expr::constant(1.0), pow(e, 2.0)), dg);
    case Op::Abs: throw NonDifferentiable("abs() cannot be differentiated");
    case Op::Sqrt: return div(dg, mul(Expr::constant(2.0), e));
    case Op::Pow: return mul(mul(Expr::constant(e.value()), pow(g, e.value() - 1.0)), dg);
    default: break;
  }
  const Expr& h = e.child(1);
  const Expr dh = differentiate(h, v);
  switch (e.op()) {
    case Op::Add: return add(dg, dh);
    case Op::Sub: return sub(dg, dh);
    case Op::Mul: return add(mul(dg, h), mul(g, dh));
    case Op::Div: return div(sub(mul(dg, h), mul(g, dh)), pow(h, 2.0));
    default: break;
  }
  throw NonDifferentiable("malformed expression node");
}

}  // namespace qsturm
