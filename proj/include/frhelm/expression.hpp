#pragma once

// Boundary-data expressions in one variable y.
//
//   expr    := term { ("+" | "-") term }
//   term    := unary { ("*" | "/") unary }
//   unary   := ("+" | "-") unary | power
//   power   := primary [ "^" unary ]          (right associative)
//   primary := number | "y" | "pi" | func "(" expr ")" | "(" expr ")"
//   func    := "sin" | "cos" | "exp" | "abs"
//
// Numbers are decimal literals with optional fraction and exponent. Whitespace
// is ignored between tokens.

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>

#include "frhelm/error.hpp"
#include "frhelm/numeric.hpp"

namespace frhelm::expr {

enum class Op { constant, var, add, sub, mul, div, pow, neg, sin, cos, exp, abs };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  Op op = Op::constant;
  double value = 0.0;  // for constants
  NodePtr lhs;         // operand of unary nodes
  NodePtr rhs;
};

inline NodePtr make_const(double v) { return std::make_shared<const Node>(Node{Op::constant, v, nullptr, nullptr}); }
inline NodePtr make_var() { return std::make_shared<const Node>(Node{Op::var, 0.0, nullptr, nullptr}); }
inline NodePtr make_unary(Op op, NodePtr a) { return std::make_shared<const Node>(Node{op, 0.0, std::move(a), nullptr}); }
inline NodePtr make_binary(Op op, NodePtr a, NodePtr b) {
  return std::make_shared<const Node>(Node{op, 0.0, std::move(a), std::move(b)});
}

inline bool is_const(const NodePtr& n, double v) { return n->op == Op::constant && n->value == v; }

// Constructors that fold the trivial cases; keeps derivative trees small.
inline NodePtr add(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  if (a->op == Op::constant && b->op == Op::constant) return make_const(a->value + b->value);
  return make_binary(Op::add, a, b);
}
inline NodePtr sub(NodePtr a, NodePtr b) {
  if (is_const(b, 0.0)) return a;
  if (a->op == Op::constant && b->op == Op::constant) return make_const(a->value - b->value);
  if (is_const(a, 0.0)) return make_unary(Op::neg, b);
  return make_binary(Op::sub, a, b);
}
inline NodePtr mul(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  if (a->op == Op::constant && b->op == Op::constant) return make_const(a->value * b->value);
  return make_binary(Op::mul, a, b);
}
inline NodePtr div(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0)) return make_const(0.0);
  if (is_const(b, 1.0)) return a;
  return make_binary(Op::div, a, b);
}
inline NodePtr neg(NodePtr a) {
  if (a->op == Op::constant) return make_const(-a->value);
  if (a->op == Op::neg) return a->lhs;
  return make_unary(Op::neg, a);
}
inline NodePtr pow(NodePtr a, NodePtr b) {
  if (is_const(b, 0.0)) return make_const(1.0);
  if (is_const(b, 1.0)) return a;
  return make_binary(Op::pow, a, b);
}

inline double eval(const Node& n, double y) {
  switch (n.op) {
    case Op::constant: return n.value;
    case Op::var: return y;
    case Op::add: return eval(*n.lhs, y) + eval(*n.rhs, y);
    case Op::sub: return eval(*n.lhs, y) - eval(*n.rhs, y);
    case Op::mul: return eval(*n.lhs, y) * eval(*n.rhs, y);
    case Op::div: return eval(*n.lhs, y) / eval(*n.rhs, y);
    case Op::pow: {
      const double e = eval(*n.rhs, y);
      const double b = eval(*n.lhs, y);
      // integer exponents by repeated multiplication so that (-2)^3 and
      // friends behave, and results do not depend on libm's pow
      if (n.rhs->op == Op::constant && e == std::floor(e) && std::abs(e) <= 64) {
        double r = 1.0;
        for (int i = 0; i < static_cast<int>(std::abs(e)); ++i) r *= b;
        return e < 0 ? 1.0 / r : r;
      }
      return std::pow(b, e);
    }
    case Op::neg: return -eval(*n.lhs, y);
    case Op::sin: return std::sin(eval(*n.lhs, y));
    case Op::cos: return std::cos(eval(*n.lhs, y));
    case Op::exp: return std::exp(eval(*n.lhs, y));
    case Op::abs: return std::abs(eval(*n.lhs, y));
  }
  return 0.0;
}

inline bool depends_on_y(const NodePtr& n) {
  if (!n) return false;
  if (n->op == Op::var) return true;
  return depends_on_y(n->lhs) || depends_on_y(n->rhs);
}

/// Symbolic d/dy. Throws DifferentiationUnsupported on abs() of a non-constant.
inline NodePtr derivative(const NodePtr& n) {
  if (!depends_on_y(n)) return make_const(0.0);
  const NodePtr& u = n->lhs;
  const NodePtr& v = n->rhs;
  switch (n->op) {
    case Op::constant: return make_const(0.0);
    case Op::var: return make_const(1.0);
    case Op::add: return add(derivative(u), derivative(v));
    case Op::sub: return sub(derivative(u), derivative(v));
    case Op::mul: return add(mul(derivative(u), v), mul(u, derivative(v)));
    case Op::div: return div(sub(mul(derivative(u), v), mul(u, derivative(v))), mul(v, v));
    case Op::neg: return neg(derivative(u));
    case Op::sin: return mul(make_unary(Op::cos, u), derivative(u));
    case Op::cos: return neg(mul(make_unary(Op::sin, u), derivative(u)));
    case Op::exp: return mul(n, derivative(u));
    case Op::pow:
      // the grammar has no log, so y in the exponent stays underivable
      if (depends_on_y(v)) {
        throw Error(ErrorKind::DifferentiationUnsupported, "derivative of a power with y in the exponent");
      }
      return mul(mul(v, pow(u, sub(v, make_const(1.0)))), derivative(u));
    case Op::abs:
      throw Error(ErrorKind::DifferentiationUnsupported, "abs() is not differentiable");
  }
  return make_const(0.0);
}

inline std::string to_string(const NodePtr& n) {
  std::ostringstream os;
  os.precision(17);
  switch (n->op) {
    case Op::constant: os << n->value; break;
    case Op::var: os << "y"; break;
    case Op::add: os << "(" << to_string(n->lhs) << " + " << to_string(n->rhs) << ")"; break;
    case Op::sub: os << "(" << to_string(n->lhs) << " - " << to_string(n->rhs) << ")"; break;
    case Op::mul: os << "(" << to_string(n->lhs) << " * " << to_string(n->rhs) << ")"; break;
    case Op::div: os << "(" << to_string(n->lhs) << " / " << to_string(n->rhs) << ")"; break;
    case Op::pow: os << "(" << to_string(n->lhs) << " ^ " << to_string(n->rhs) << ")"; break;
    case Op::neg: os << "(-" << to_string(n->lhs) << ")"; break;
    case Op::sin: os << "sin(" << to_string(n->lhs) << ")"; break;
    case Op::cos: os << "cos(" << to_string(n->lhs) << ")"; break;
    case Op::exp: os << "exp(" << to_string(n->lhs) << ")"; break;
    case Op::abs: os << "abs(" << to_string(n->lhs) << ")"; break;
  }
  return os.str();
}

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ < s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(pos_ + 1, msg); }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= s_.size()) fail(std::string("expected '") + c + "' before end of input");
      fail(std::string("expected '") + c + "'");
    }
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make_binary(Op::add, lhs, term());
      } else if (accept('-')) {
        lhs = make_binary(Op::sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make_binary(Op::mul, lhs, unary());
      } else if (accept('/')) {
        lhs = make_binary(Op::div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make_unary(Op::neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make_binary(Op::pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string_view name = s_.substr(start, pos_ - start);
      if (name == "y") return make_var();
      if (name == "pi") return make_const(pi);
      Op op;
      if (name == "sin") {
        op = Op::sin;
      } else if (name == "cos") {
        op = Op::cos;
      } else if (name == "exp") {
        op = Op::exp;
      } else if (name == "abs") {
        op = Op::abs;
      } else {
        pos_ = start;
        fail("unknown identifier '" + std::string(name) + "'");
      }
      expect('(');
      NodePtr arg = expr();
      expect(')');
      return make_unary(op, arg);
    }
    if (accept('(')) {
      NodePtr e = expr();
      expect(')');
      return e;
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_, ++n;
      return n;
    };
    std::size_t n = digits();
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      n += digits();
    }
    if (n == 0) fail("malformed number");
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      const std::size_t mark = pos_;
      ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (digits() == 0) {
        pos_ = mark;
        fail("malformed exponent");
      }
    }
    const std::string text(s_.substr(start, pos_ - start));
    return make_const(std::strtod(text.c_str(), nullptr));
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

inline NodePtr parse(std::string_view text) { return Parser(text).parse(); }

}  // namespace frhelm::expr
