#pragma once

#include <memory>
#include <sstream>
#include <string>
#include <utility>

#include "conslaw/jet.hpp"

namespace conslaw {

enum class NodeKind {
  Constant,
  Var,
  Add,
  Sub,
  Mul,
  Div,
  Neg,
  IntPow,   // base^n, n integer (may be negative)
  RealPow,  // base^r, r real non-integer; base must stay positive
  Sin,
  Cos,
  Exp,
  AbsPow,    // |base|^q, q > 0
  FlatBump,  // exp(-1/base^2), 0 at base = 0
};

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  NodeKind kind;
  double value = 0.0;    // Constant
  int ipow = 0;          // IntPow
  double rexp = 0.0;     // RealPow / AbsPow exponent
  ExprPtr a, b;          // children
};

class Expr {
 public:
  Expr() = default;
  explicit Expr(ExprPtr node) : node_(std::move(node)) {}

  static Expr constant(double v) { return make(NodeKind::Constant, v); }
  static Expr var() { return make(NodeKind::Var); }

  friend Expr operator+(const Expr& x, const Expr& y) { return binary(NodeKind::Add, x, y); }
  friend Expr operator-(const Expr& x, const Expr& y) { return binary(NodeKind::Sub, x, y); }
  friend Expr operator*(const Expr& x, const Expr& y) { return binary(NodeKind::Mul, x, y); }
  friend Expr operator/(const Expr& x, const Expr& y) { return binary(NodeKind::Div, x, y); }
  friend Expr operator-(const Expr& x) { return unary(NodeKind::Neg, x); }

  static Expr sin(const Expr& x) { return unary(NodeKind::Sin, x); }
  static Expr cos(const Expr& x) { return unary(NodeKind::Cos, x); }
  static Expr exp(const Expr& x) { return unary(NodeKind::Exp, x); }
  static Expr pow(const Expr& x, int n) {
    Expr e = unary(NodeKind::IntPow, x);
    const_cast<ExprNode*>(e.node_.get())->ipow = n;
    return e;
  }
  static Expr pow(const Expr& x, double r) {
    Expr e = unary(NodeKind::RealPow, x);
    const_cast<ExprNode*>(e.node_.get())->rexp = r;
    return e;
  }
  static Expr abs_pow(const Expr& x, double q) {
    Expr e = unary(NodeKind::AbsPow, x);
    const_cast<ExprNode*>(e.node_.get())->rexp = q;
    return e;
  }
  static Expr flat_bump(const Expr& x) { return unary(NodeKind::FlatBump, x); }

  bool valid() const { return node_ != nullptr; }
  const ExprNode& node() const { return *node_; }
  ExprPtr ptr() const { return node_; }

  /// Taylor jet of the expression at u, truncated at `order`.
  Jet jet(double u, int order) const { return eval_node(*node_, u, order); }

  double operator()(double u) const { return jet(u, 0).value(); }

  /// Infix form that round-trips through parse_expr.
  std::string str() const {
    std::ostringstream os;
    print_node(*node_, os, 0);
    return os.str();
  }

 private:
  ExprPtr node_;

  static Expr make(NodeKind k, double v = 0.0) {
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    n->value = v;
    return Expr(n);
  }
  static Expr unary(NodeKind k, const Expr& x) {
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    n->a = x.node_;
    return Expr(n);
  }
  static Expr binary(NodeKind k, const Expr& x, const Expr& y) {
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    n->a = x.node_;
    n->b = y.node_;
    return Expr(n);
  }

  static Jet eval_node(const ExprNode& n, double u, int K) {
    switch (n.kind) {
      case NodeKind::Constant: return Jet::constant(n.value, u, K);
      case NodeKind::Var: return Jet::variable(u, K);
      case NodeKind::Add: return eval_node(*n.a, u, K) + eval_node(*n.b, u, K);
      case NodeKind::Sub: return eval_node(*n.a, u, K) - eval_node(*n.b, u, K);
      case NodeKind::Mul: return eval_node(*n.a, u, K) * eval_node(*n.b, u, K);
      case NodeKind::Div: return eval_node(*n.a, u, K) / eval_node(*n.b, u, K);
      case NodeKind::Neg: return -eval_node(*n.a, u, K);
      case NodeKind::IntPow: return jet_pow_int(eval_node(*n.a, u, K), n.ipow);
      case NodeKind::RealPow: return jet_pow_real(eval_node(*n.a, u, K), n.rexp);
      case NodeKind::Sin: return jet_sin(eval_node(*n.a, u, K));
      case NodeKind::Cos: return jet_cos(eval_node(*n.a, u, K));
      case NodeKind::Exp: return jet_exp(eval_node(*n.a, u, K));
      case NodeKind::AbsPow: return jet_abs_pow(eval_node(*n.a, u, K), n.rexp);
      case NodeKind::FlatBump: return jet_flat_bump(eval_node(*n.a, u, K));
    }
    throw std::logic_error("unreachable expression node kind");
  }

  static std::string num(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
  }

  // Precedence levels: 0 add, 1 mul, 2 unary, 3 power/atom.
  static void print_node(const ExprNode& n, std::ostringstream& os, int parent_prec) {
    auto wrap = [&](int prec, auto&& body) {
      bool paren = prec < parent_prec;
      if (paren) os << '(';
      body();
      if (paren) os << ')';
    };
    switch (n.kind) {
      case NodeKind::Constant:
        if (n.value < 0) {
          os << '(' << num(n.value) << ')';
        } else {
          os << num(n.value);
        }
        return;
      case NodeKind::Var: os << 'u'; return;
      case NodeKind::Add:
        wrap(0, [&] { print_node(*n.a, os, 0); os << " + "; print_node(*n.b, os, 1); });
        return;
      case NodeKind::Sub:
        wrap(0, [&] { print_node(*n.a, os, 0); os << " - "; print_node(*n.b, os, 1); });
        return;
      case NodeKind::Mul:
        wrap(1, [&] { print_node(*n.a, os, 1); os << "*"; print_node(*n.b, os, 2); });
        return;
      case NodeKind::Div:
        wrap(1, [&] { print_node(*n.a, os, 1); os << "/"; print_node(*n.b, os, 2); });
        return;
      case NodeKind::Neg:
        wrap(2, [&] { os << '-'; print_node(*n.a, os, 2); });
        return;
      case NodeKind::IntPow:
        wrap(3, [&] {
          print_node(*n.a, os, 4);
          os << '^';
          if (n.ipow < 0) os << '(' << n.ipow << ')';
          else os << n.ipow;
        });
        return;
      case NodeKind::RealPow:
        wrap(3, [&] { print_node(*n.a, os, 4); os << '^' << num(n.rexp); });
        return;
      case NodeKind::Sin: os << "sin("; print_node(*n.a, os, 0); os << ')'; return;
      case NodeKind::Cos: os << "cos("; print_node(*n.a, os, 0); os << ')'; return;
      case NodeKind::Exp: os << "exp("; print_node(*n.a, os, 0); os << ')'; return;
      case NodeKind::AbsPow:
        os << "abspow(";
        print_node(*n.a, os, 0);
        os << ", " << num(n.rexp) << ')';
        return;
      case NodeKind::FlatBump: os << "flatbump("; print_node(*n.a, os, 0); os << ')'; return;
    }
  }
};

}  // namespace conslaw
