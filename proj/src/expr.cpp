#include "streamspec/expr.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <cmath>
#include <cstdlib>

namespace streamspec::expr {

Expr Expr::constant(double value) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::constant;
  n->value = value;
  return Expr(std::move(n));
}

Expr Expr::variable(int index) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::variable;
  n->index = index;
  return Expr(std::move(n));
}

Expr Expr::unary(UnaryOp op, Expr operand) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::unary;
  n->uop = op;
  n->lhs = std::move(operand);
  return Expr(std::move(n));
}

Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::binary;
  n->bop = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return Expr(std::move(n));
}

int Expr::max_variable() const {
  if (!node_) return -1;
  switch (node_->kind) {
    case NodeKind::constant: return -1;
    case NodeKind::variable: return node_->index;
    case NodeKind::unary: return node_->lhs.max_variable();
    case NodeKind::binary:
      return std::max(node_->lhs.max_variable(), node_->rhs.max_variable());
  }
  return -1;
}

std::size_t Expr::depth() const {
  if (!node_) return 0;
  switch (node_->kind) {
    case NodeKind::constant:
    case NodeKind::variable: return 1;
    case NodeKind::unary: return 1 + node_->lhs.depth();
    case NodeKind::binary:
      return 1 + std::max(node_->lhs.depth(), node_->rhs.depth());
  }
  return 0;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  const Node& x = *a.node_;
  const Node& y = *b.node_;
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case NodeKind::constant: return x.value == y.value;
    case NodeKind::variable: return x.index == y.index;
    case NodeKind::unary: return x.uop == y.uop && x.lhs == y.lhs;
    case NodeKind::binary:
      return x.bop == y.bop && x.lhs == y.lhs && x.rhs == y.rhs;
  }
  return false;
}

ParseError::ParseError(std::size_t position, const std::string& message)
    : Error("parse error at offset " + std::to_string(position) + ": " +
            message),
      position_(position),
      message_(message) {}

namespace {

struct FunctionName {
  std::string_view name;
  UnaryOp op;
};

constexpr FunctionName kFunctions[] = {
    {"sin", UnaryOp::sin},   {"cos", UnaryOp::cos}, {"exp", UnaryOp::exp},
    {"log", UnaryOp::log},   {"sqrt", UnaryOp::sqrt}, {"abs", UnaryOp::abs},
    {"sign", UnaryOp::sign},
};

class Parser {
 public:
  Parser(std::string_view text, int dimension)
      : text_(text), dimension_(dimension) {}

  Expr run() {
    Expr e = parse_expr();
    skip_ws();
    if (pos_ < text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(std::min(pos_, text_.size()), msg);
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
            text_[pos_] == '\r'))
      ++pos_;
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
    if (!accept(c)) {
      if (pos_ >= text_.size())
        fail(std::string("expected '") + c + "' before end of input");
      fail(std::string("expected '") + c + "'");
    }
  }

  Expr parse_expr() {
    Expr lhs = parse_term();
    for (;;) {
      if (accept('+'))
        lhs = Expr::binary(BinaryOp::add, lhs, parse_term());
      else if (accept('-'))
        lhs = Expr::binary(BinaryOp::sub, lhs, parse_term());
      else
        return lhs;
    }
  }

  Expr parse_term() {
    Expr lhs = parse_factor();
    for (;;) {
      if (accept('*'))
        lhs = Expr::binary(BinaryOp::mul, lhs, parse_factor());
      else if (accept('/'))
        lhs = Expr::binary(BinaryOp::div, lhs, parse_factor());
      else
        return lhs;
    }
  }

  Expr parse_factor() {
    Expr base = parse_base();
    if (accept('^')) return Expr::binary(BinaryOp::pow, base, parse_factor());
    return base;
  }

  Expr parse_base() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '-') {
      ++pos_;
      return Expr::unary(UnaryOp::neg, parse_factor());
    }
    if (c == '(') {
      ++pos_;
      Expr inner = parse_expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
    if (c == ')') fail("unbalanced ')'");
    fail("unexpected '" + std::string(1, c) + "'");
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
    };
    digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
        digits();
      else
        pos_ = save;
    }
    std::string token(text_.substr(start, pos_ - start));
    if (token == ".") {
      pos_ = start;
      fail("malformed number");
    }
    char* end = nullptr;
    double v = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size()) {
      pos_ = start;
      fail("malformed number '" + token + "'");
    }
    return Expr::constant(v);
  }

  Expr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    std::string_view ident = text_.substr(start, pos_ - start);

    if (ident.size() > 1 && ident[0] == 'x' &&
        std::all_of(ident.begin() + 1, ident.end(),
                    [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
      int index = 0;
      auto [p, ec] = std::from_chars(ident.data() + 1, ident.data() + ident.size(), index);
      if (ec != std::errc()) {
        pos_ = start;
        fail("variable index out of range");
      }
      if (index >= dimension_) {
        pos_ = start;
        fail("variable x" + std::to_string(index) + " exceeds dimension " +
             std::to_string(dimension_));
      }
      return Expr::variable(index);
    }

    for (const auto& f : kFunctions) {
      if (f.name != ident) continue;
      skip_ws();
      if (pos_ >= text_.size() || text_[pos_] != '(')
        fail("function '" + std::string(ident) + "' requires '('");
      ++pos_;
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == ')')
        fail("function '" + std::string(ident) + "' takes exactly one argument");
      Expr arg = parse_expr();
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == ',')
        fail("function '" + std::string(ident) + "' takes exactly one argument");
      expect(')');
      return Expr::unary(f.op, arg);
    }
    pos_ = start;
    fail("unknown identifier '" + std::string(ident) + "'");
  }

  std::string_view text_;
  int dimension_;
  std::size_t pos_ = 0;
};

bool is_integer(double v) { return std::isfinite(v) && std::floor(v) == v; }

}  // namespace

Expr parse(std::string_view text, int dimension) {
  if (dimension < 0) throw PreconditionError("negative dimension");
  return Parser(text, dimension).run();
}

EvalResult evaluate(const Expr& e, PointView x) {
  if (e.empty()) return {0.0, "empty expression"};
  const Node& n = e.node();
  switch (n.kind) {
    case NodeKind::constant: return {n.value, std::nullopt};
    case NodeKind::variable:
      if (n.index < 0 || static_cast<std::size_t>(n.index) >= x.size())
        return {0.0, "variable index out of range"};
      return {x[n.index], std::nullopt};
    case NodeKind::unary: {
      EvalResult a = evaluate(n.lhs, x);
      if (!a.ok()) return a;
      double v = a.value;
      double r = 0.0;
      switch (n.uop) {
        case UnaryOp::neg: r = -v; break;
        case UnaryOp::sin: r = std::sin(v); break;
        case UnaryOp::cos: r = std::cos(v); break;
        case UnaryOp::exp: r = std::exp(v); break;
        case UnaryOp::log:
          if (v <= 0.0) return {0.0, "log of non-positive argument"};
          r = std::log(v);
          break;
        case UnaryOp::sqrt:
          if (v < 0.0) return {0.0, "sqrt of negative argument"};
          r = std::sqrt(v);
          break;
        case UnaryOp::abs: r = std::fabs(v); break;
        case UnaryOp::sign: r = (v > 0.0) - (v < 0.0); break;
      }
      if (!std::isfinite(r)) return {0.0, "non-finite result"};
      return {r, std::nullopt};
    }
    case NodeKind::binary: {
      EvalResult a = evaluate(n.lhs, x);
      if (!a.ok()) return a;
      EvalResult b = evaluate(n.rhs, x);
      if (!b.ok()) return b;
      double r = 0.0;
      switch (n.bop) {
        case BinaryOp::add: r = a.value + b.value; break;
        case BinaryOp::sub: r = a.value - b.value; break;
        case BinaryOp::mul: r = a.value * b.value; break;
        case BinaryOp::div:
          if (b.value == 0.0) return {0.0, "division by zero"};
          r = a.value / b.value;
          break;
        case BinaryOp::pow:
          if (a.value < 0.0 && !is_integer(b.value))
            return {0.0, "fractional power of negative base"};
          if (a.value == 0.0 && b.value < 0.0) return {0.0, "division by zero"};
          r = std::pow(a.value, b.value);
          break;
      }
      if (!std::isfinite(r)) return {0.0, "non-finite result"};
      return {r, std::nullopt};
    }
  }
  return {0.0, "malformed expression"};
}

double evaluate_or_throw(const Expr& e, PointView x) {
  EvalResult r = evaluate(e, x);
  if (!r.ok()) throw NumericalError("expression evaluation failed: " + *r.error);
  return r.value;
}

namespace {

bool is_const(const Expr& e, double v) {
  return e.node().kind == NodeKind::constant && e.node().value == v;
}
bool is_const(const Expr& e) { return e.node().kind == NodeKind::constant; }

Expr add(Expr a, Expr b) {
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  if (is_const(a) && is_const(b)) return Expr::constant(a.node().value + b.node().value);
  return Expr::binary(BinaryOp::add, a, b);
}
Expr sub(Expr a, Expr b) {
  if (is_const(b, 0.0)) return a;
  if (is_const(a) && is_const(b)) return Expr::constant(a.node().value - b.node().value);
  if (is_const(a, 0.0)) return Expr::unary(UnaryOp::neg, b);
  return Expr::binary(BinaryOp::sub, a, b);
}
Expr mul(Expr a, Expr b) {
  if (is_const(a, 0.0) || is_const(b, 0.0)) return Expr::constant(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  if (is_const(a) && is_const(b)) return Expr::constant(a.node().value * b.node().value);
  return Expr::binary(BinaryOp::mul, a, b);
}
Expr div(Expr a, Expr b) {
  if (is_const(a, 0.0)) return Expr::constant(0.0);
  if (is_const(b, 1.0)) return a;
  return Expr::binary(BinaryOp::div, a, b);
}
Expr neg(Expr a) {
  if (is_const(a)) return Expr::constant(-a.node().value);
  return Expr::unary(UnaryOp::neg, a);
}
Expr un(UnaryOp op, Expr a) { return Expr::unary(op, a); }

bool depends_on(const Expr& e, int var) {
  const Node& n = e.node();
  switch (n.kind) {
    case NodeKind::constant: return false;
    case NodeKind::variable: return n.index == var;
    case NodeKind::unary: return depends_on(n.lhs, var);
    case NodeKind::binary: return depends_on(n.lhs, var) || depends_on(n.rhs, var);
  }
  return false;
}

}  // namespace

Expr differentiate(const Expr& e, int var) {
  if (e.empty()) throw PreconditionError("cannot differentiate an empty expression");
  if (var < 0) throw PreconditionError("negative variable index");
  const Node& n = e.node();
  switch (n.kind) {
    case NodeKind::constant: return Expr::constant(0.0);
    case NodeKind::variable: return Expr::constant(n.index == var ? 1.0 : 0.0);
    case NodeKind::unary: {
      const Expr& u = n.lhs;
      Expr du = differentiate(u, var);
      if (is_const(du, 0.0)) return Expr::constant(0.0);
      switch (n.uop) {
        case UnaryOp::neg: return neg(du);
        case UnaryOp::sin: return mul(un(UnaryOp::cos, u), du);
        case UnaryOp::cos: return neg(mul(un(UnaryOp::sin, u), du));
        case UnaryOp::exp: return mul(e, du);
        case UnaryOp::log: return div(du, u);
        case UnaryOp::sqrt: return div(du, mul(Expr::constant(2.0), e));
        case UnaryOp::abs: return mul(un(UnaryOp::sign, u), du);
        case UnaryOp::sign: return Expr::constant(0.0);
      }
      break;
    }
    case NodeKind::binary: {
      const Expr& a = n.lhs;
      const Expr& b = n.rhs;
      Expr da = differentiate(a, var);
      Expr db = differentiate(b, var);
      switch (n.bop) {
        case BinaryOp::add: return add(da, db);
        case BinaryOp::sub: return sub(da, db);
        case BinaryOp::mul: return add(mul(da, b), mul(a, db));
        case BinaryOp::div:
          if (is_const(db, 0.0)) return div(da, b);
          return div(sub(mul(da, b), mul(a, db)), mul(b, b));
        case BinaryOp::pow:
          if (!depends_on(b, var)) {
            // d(a^c) = c a^(c-1) a'
            Expr cm1 = is_const(b) ? Expr::constant(b.node().value - 1.0)
                                   : sub(b, Expr::constant(1.0));
            return mul(mul(b, Expr::binary(BinaryOp::pow, a, cm1)), da);
          }
          // d(a^b) = a^b (b' log a + b a'/a)
          return mul(e, add(mul(db, un(UnaryOp::log, a)), div(mul(b, da), a)));
      }
      break;
    }
  }
  throw PreconditionError("malformed expression");
}

Expr divergence(const std::vector<Expr>& field) {
  Expr acc = Expr::constant(0.0);
  for (std::size_t i = 0; i < field.size(); ++i)
    acc = add(acc, differentiate(field[i], static_cast<int>(i)));
  return acc;
}

namespace {

std::string format_number(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::string_view unary_name(UnaryOp op) {
  for (const auto& f : kFunctions)
    if (f.op == op) return f.name;
  return "";
}

char binary_symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::add: return '+';
    case BinaryOp::sub: return '-';
    case BinaryOp::mul: return '*';
    case BinaryOp::div: return '/';
    case BinaryOp::pow: return '^';
  }
  return '?';
}

}  // namespace

std::string to_string(const Expr& e) {
  if (e.empty()) return "";
  const Node& n = e.node();
  switch (n.kind) {
    case NodeKind::constant:
      if (n.value < 0.0 || std::signbit(n.value)) return "(-" + format_number(-n.value) + ")";
      return format_number(n.value);
    case NodeKind::variable: return "x" + std::to_string(n.index);
    case NodeKind::unary:
      if (n.uop == UnaryOp::neg) return "(-" + to_string(n.lhs) + ")";
      return std::string(unary_name(n.uop)) + "(" + to_string(n.lhs) + ")";
    case NodeKind::binary:
      return "(" + to_string(n.lhs) + " " + binary_symbol(n.bop) + " " +
             to_string(n.rhs) + ")";
  }
  return "";
}

}  // namespace streamspec::expr
