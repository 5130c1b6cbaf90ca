#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "conslaw/expr.hpp"

namespace conslaw {

/// Raised when an expression falls outside the decidable
/// polynomial / trig-polynomial class.
class unsupported_expression : public std::runtime_error {
 public:
  explicit unsupported_expression(const std::string& what) : std::runtime_error(what) {}
};

/// Canonical form sum_{m,w} u^m (c cos(wu) + s sin(wu)), w >= 0.
/// Pure polynomials are the w = 0 cos-terms.  Closed under +, *, d/du,
/// which is all the definition classifiers need.
class TrigPoly {
 public:
  struct Key {
    int m;
    double omega;
    bool operator<(const Key& o) const {
      if (m != o.m) return m < o.m;
      return omega < o.omega;
    }
  };
  // value[0] multiplies cos(omega u), value[1] multiplies sin(omega u)
  std::map<Key, std::array<double, 2>> terms;

  static TrigPoly constant(double c) {
    TrigPoly p;
    if (c != 0.0) p.terms[{0, 0.0}] = {c, 0.0};
    return p;
  }
  static TrigPoly variable() {
    TrigPoly p;
    p.terms[{1, 0.0}] = {1.0, 0.0};
    return p;
  }

  bool is_constant(double* value = nullptr) const {
    if (terms.empty()) {
      if (value) *value = 0.0;
      return true;
    }
    if (terms.size() == 1) {
      auto it = terms.begin();
      if (it->first.m == 0 && it->first.omega == 0.0 && it->second[1] == 0.0) {
        if (value) *value = it->second[0];
        return true;
      }
    }
    return false;
  }

  /// Linear argument b + k*u; required for sin/cos nodes.
  bool is_linear(double* b, double* k) const {
    double cb = 0.0, ck = 0.0;
    for (const auto& [key, cs] : terms) {
      if (key.omega != 0.0 || cs[1] != 0.0) return false;
      if (key.m == 0) cb = cs[0];
      else if (key.m == 1) ck = cs[0];
      else if (cs[0] != 0.0) return false;
    }
    *b = cb;
    *k = ck;
    return true;
  }

  void add_term(int m, double omega, double ccos, double csin) {
    if (omega < 0.0) {
      omega = -omega;
      csin = -csin;
    }
    if (omega == 0.0) csin = 0.0;  // sin(0u) contributes nothing
    if (ccos == 0.0 && csin == 0.0) return;
    // snap to an existing frequency within tolerance so sums/differences
    // of equal literals collapse onto one basis element
    auto it = terms.lower_bound({m, omega - 1e-9});
    if (it != terms.end() && it->first.m == m && std::abs(it->first.omega - omega) <= 1e-9) {
      it->second[0] += ccos;
      it->second[1] += csin;
      return;
    }
    auto& slot = terms[{m, omega}];
    slot[0] += ccos;
    slot[1] += csin;
  }

  TrigPoly& operator+=(const TrigPoly& o) {
    for (const auto& [key, cs] : o.terms) add_term(key.m, key.omega, cs[0], cs[1]);
    prune();
    return *this;
  }

  friend TrigPoly operator+(TrigPoly a, const TrigPoly& b) { return a += b; }

  TrigPoly operator-() const {
    TrigPoly r;
    for (const auto& [key, cs] : terms) r.terms[key] = {-cs[0], -cs[1]};
    return r;
  }

  friend TrigPoly operator-(const TrigPoly& a, const TrigPoly& b) { return a + (-b); }

  friend TrigPoly operator*(const TrigPoly& a, const TrigPoly& b) {
    TrigPoly r;
    for (const auto& [ka, ca] : a.terms) {
      for (const auto& [kb, cb] : b.terms) {
        int m = ka.m + kb.m;
        double w1 = ka.omega, w2 = kb.omega;
        double wm = w1 - w2, wp = w1 + w2;
        // cos*cos, sin*sin, sin*cos, cos*sin via product-to-sum
        r.add_term(m, wm, 0.5 * ca[0] * cb[0], 0.0);
        r.add_term(m, wp, 0.5 * ca[0] * cb[0], 0.0);
        r.add_term(m, wm, 0.5 * ca[1] * cb[1], 0.0);
        r.add_term(m, wp, -0.5 * ca[1] * cb[1], 0.0);
        r.add_term(m, wp, 0.0, 0.5 * ca[1] * cb[0]);
        r.add_term(m, wm, 0.0, 0.5 * ca[1] * cb[0]);
        r.add_term(m, wp, 0.0, 0.5 * ca[0] * cb[1]);
        r.add_term(m, wm, 0.0, -0.5 * ca[0] * cb[1]);
      }
    }
    r.prune();
    return r;
  }

  TrigPoly scaled(double lambda) const {
    TrigPoly r;
    if (lambda == 0.0) return r;
    for (const auto& [key, cs] : terms) r.terms[key] = {lambda * cs[0], lambda * cs[1]};
    return r;
  }

  TrigPoly derivative() const {
    TrigPoly r;
    for (const auto& [key, cs] : terms) {
      if (key.m > 0) {
        r.add_term(key.m - 1, key.omega, key.m * cs[0], key.m * cs[1]);
      }
      if (key.omega != 0.0) {
        r.add_term(key.m, key.omega, key.omega * cs[1], -key.omega * cs[0]);
      }
    }
    r.prune();
    return r;
  }

  void prune(double tol = 0.0) {
    for (auto it = terms.begin(); it != terms.end();) {
      if (std::abs(it->second[0]) <= tol && std::abs(it->second[1]) <= tol)
        it = terms.erase(it);
      else
        ++it;
    }
  }
};

/// Extract the canonical form, or throw unsupported_expression.
inline TrigPoly trigpoly_from(const ExprNode& n) {
  switch (n.kind) {
    case NodeKind::Constant: return TrigPoly::constant(n.value);
    case NodeKind::Var: return TrigPoly::variable();
    case NodeKind::Add: return trigpoly_from(*n.a) + trigpoly_from(*n.b);
    case NodeKind::Sub: return trigpoly_from(*n.a) - trigpoly_from(*n.b);
    case NodeKind::Neg: return -trigpoly_from(*n.a);
    case NodeKind::Mul: return trigpoly_from(*n.a) * trigpoly_from(*n.b);
    case NodeKind::Div: {
      TrigPoly rhs = trigpoly_from(*n.b);
      double c;
      if (!rhs.is_constant(&c) || c == 0.0)
        throw unsupported_expression("division by a non-constant expression");
      return trigpoly_from(*n.a).scaled(1.0 / c);
    }
    case NodeKind::IntPow: {
      if (n.ipow < 0) throw unsupported_expression("negative power");
      if (n.ipow > 24) throw unsupported_expression("power too large for expansion");
      TrigPoly base = trigpoly_from(*n.a);
      TrigPoly acc = TrigPoly::constant(1.0);
      for (int i = 0; i < n.ipow; ++i) acc = acc * base;
      return acc;
    }
    case NodeKind::Sin:
    case NodeKind::Cos: {
      TrigPoly arg = trigpoly_from(*n.a);
      double b, k;
      if (!arg.is_linear(&b, &k))
        throw unsupported_expression("trig function of a nonlinear argument");
      TrigPoly r;
      if (n.kind == NodeKind::Sin) {
        // sin(b + ku) = sin b cos(ku) + cos b sin(ku)
        r.add_term(0, k, std::sin(b), std::cos(b));
      } else {
        r.add_term(0, k, std::cos(b), -std::sin(b));
      }
      r.prune();
      return r;
    }
    default:
      throw unsupported_expression("expression is not a (trig-)polynomial");
  }
}

inline TrigPoly trigpoly_from(const Expr& e) { return trigpoly_from(e.node()); }

}  // namespace conslaw
