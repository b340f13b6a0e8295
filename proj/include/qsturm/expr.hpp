#pragma once

// Coefficient expressions a(x,u,p) and f(x,u,p): parsing, printing,
// scalar and array evaluation, symbolic differentiation.
//
// Grammar (whitespace ignored):
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?          exponent must be constant
//   primary := number | 'x' | 'u' | 'p' | 'pi' | parameter
//            | function '(' expr ')' | '(' expr ')'
//   function:= sin cos tan exp ln tanh abs sqrt
//
// A '-' immediately followed by a numeric literal (and no '^') yields a
// negative constant, so printed trees parse back unchanged.

#include <Eigen/Core>

#include <map>
#include <memory>
#include <string>
#include <string_view>

namespace qsturm {

enum class Var { X, U, P };

enum class Op {
  Const,
  Variable,
  Neg,
  Sin,
  Cos,
  Tan,
  Exp,
  Ln,
  Tanh,
  Abs,
  Sqrt,
  Add,
  Sub,
  Mul,
  Div,
  Pow,
};

std::size_t arity(Op op);
std::string_view op_name(Op op);

using ParameterMap = std::map<std::string, double, std::less<>>;

/// Immutable expression tree. Copies share nodes.
class Expr {
public:
  struct Node;

  /// The constant 0.
  Expr();

  static Expr constant(double value);
  static Expr variable(Var v);
  static Expr unary(Op op, Expr arg);
  static Expr binary(Op op, Expr lhs, Expr rhs);
  /// base ^ exponent with a constant exponent.
  static Expr power(Expr base, double exponent);

  Op op() const;
  /// Constant value (Const nodes) or exponent (Pow nodes).
  double value() const;
  Var var() const;
  const Expr& child(std::size_t i) const;

  bool is_constant() const { return op() == Op::Const; }
  bool is_constant(double v) const { return is_constant() && value() == v; }

private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

Expr parse(std::string_view text, const ParameterMap& params = {});

/// Fully parenthesized infix form; parse(to_string(e)) is structurally equal to e.
std::string to_string(const Expr& e);

bool structurally_equal(const Expr& a, const Expr& b);
bool depends_on(const Expr& e, Var v);
std::size_t depth(const Expr& e);

/// Throws DomainError on ln/sqrt outside their domain, division by zero,
/// or any non-finite intermediate.
double eval(const Expr& e, double x, double u, double p);

/// Elementwise evaluation over equally sized arrays.
Eigen::ArrayXd eval(const Expr& e, const Eigen::ArrayXd& x, const Eigen::ArrayXd& u,
                    const Eigen::ArrayXd& p);

/// Exact derivative, simplified by constant folding and 0/1 identities only.
/// Throws NonDifferentiable for abs() of a subtree that depends on v.
Expr differentiate(const Expr& e, Var v);

}  // namespace qsturm
