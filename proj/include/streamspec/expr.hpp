#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "streamspec/common.hpp"

namespace streamspec::expr {

enum class NodeKind { constant, variable, unary, binary };

enum class UnaryOp { neg, sin, cos, exp, log, sqrt, abs, sign };

enum class BinaryOp { add, sub, mul, div, pow };

struct Node;

/// Immutable expression tree. Copies share structure.
class Expr {
 public:
  Expr() = default;

  static Expr constant(double value);
  static Expr variable(int index);
  static Expr unary(UnaryOp op, Expr operand);
  static Expr binary(BinaryOp op, Expr lhs, Expr rhs);

  bool empty() const { return !node_; }
  const Node& node() const { return *node_; }

  /// Largest variable index referenced, or -1 when the tree is closed.
  int max_variable() const;
  std::size_t depth() const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct Node {
  NodeKind kind = NodeKind::constant;
  double value = 0.0;
  int index = 0;
  UnaryOp uop = UnaryOp::neg;
  BinaryOp bop = BinaryOp::add;
  Expr lhs;  // operand of unary nodes
  Expr rhs;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t position, const std::string& message);
  std::size_t position() const { return position_; }
  const std::string& message() const { return message_; }

 private:
  std::size_t position_;
  std::string message_;
};

// Grammar (whitespace insignificant):
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := base ('^' factor)?
//   base   := number | 'x'digit+ | func '(' expr ')' | '(' expr ')' | '-' factor
// so "-x0^2" is -(x0^2) and "2^-x0" is 2^(-x0). Implicit multiplication is
// rejected.
Expr parse(std::string_view text, int dimension);

struct EvalResult {
  double value = 0.0;
  std::optional<std::string> error;
  bool ok() const { return !error.has_value(); }
};

/// Division by zero, sqrt/log of a negative argument, fractional powers of a
/// negative base and non-finite results are reported in `error`.
EvalResult evaluate(const Expr& e, PointView x);

/// Evaluate and throw NumericalError on failure.
double evaluate_or_throw(const Expr& e, PointView x);

/// Exact symbolic partial derivative with light constant folding.
Expr differentiate(const Expr& e, int var);

/// Sum of ∂F_i/∂x_i.
Expr divergence(const std::vector<Expr>& field);

/// Text that parses back to the same tree.
std::string to_string(const Expr& e);

}  // namespace streamspec::expr
