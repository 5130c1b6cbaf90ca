#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace conslaw {

/// Thrown when an expression is evaluated outside its domain
/// (division by zero, fractional power of a non-positive base, ...).
class eval_domain_error : public std::runtime_error {
 public:
  explicit eval_domain_error(const std::string& what) : std::runtime_error(what) {}
};

/// Truncated Taylor expansion of a scalar function at a base point:
/// coefficient k stores f^(k)(u) / k!.  All elementary operations
/// propagate the full jet, so derivatives of arbitrary compositions are
/// exact up to floating-point rounding (no finite differences).
///
/// The recurrences below are the classical Taylor-mode AD formulas:
/// products are Cauchy convolutions, quotients/exponentials/powers come
/// from differentiating the defining ODE of the result series.
class Jet {
 public:
  Jet() = default;
  Jet(double base, int order) : base_(base), c_(static_cast<std::size_t>(order) + 1, 0.0) {}

  static Jet constant(double value, double base, int order) {
    Jet j(base, order);
    j.c_[0] = value;
    return j;
  }
  static Jet variable(double base, int order) {
    Jet j(base, order);
    j.c_[0] = base;
    if (order >= 1) j.c_[1] = 1.0;
    return j;
  }

  int order() const { return static_cast<int>(c_.size()) - 1; }
  double base() const { return base_; }
  double coeff(int k) const { return c_[static_cast<std::size_t>(k)]; }
  double& coeff(int k) { return c_[static_cast<std::size_t>(k)]; }
  double value() const { return c_[0]; }

  /// k-th derivative, i.e. coeff(k) * k!.
  double derivative(int k) const {
    double fact = 1.0;
    for (int i = 2; i <= k; ++i) fact *= i;
    return c_[static_cast<std::size_t>(k)] * fact;
  }

  const std::vector<double>& coeffs() const { return c_; }

 private:
  double base_ = 0.0;
  std::vector<double> c_{0.0};
  friend Jet operator+(const Jet&, const Jet&);
  friend Jet operator-(const Jet&, const Jet&);
  friend Jet operator-(const Jet&);
  friend Jet operator*(const Jet&, const Jet&);
  friend Jet operator/(const Jet&, const Jet&);
};

inline Jet operator+(const Jet& a, const Jet& b) {
  Jet r = a;
  for (std::size_t k = 0; k < r.c_.size(); ++k) r.c_[k] += b.c_[k];
  return r;
}

inline Jet operator-(const Jet& a, const Jet& b) {
  Jet r = a;
  for (std::size_t k = 0; k < r.c_.size(); ++k) r.c_[k] -= b.c_[k];
  return r;
}

inline Jet operator-(const Jet& a) {
  Jet r = a;
  for (auto& c : r.c_) c = -c;
  return r;
}

/// Leibniz/Cauchy convolution.
inline Jet operator*(const Jet& a, const Jet& b) {
  const int K = a.order();
  Jet r(a.base(), K);
  for (int k = 0; k <= K; ++k) {
    double s = 0.0;
    for (int i = 0; i <= k; ++i) s += a.coeff(i) * b.coeff(k - i);
    r.coeff(k) = s;
  }
  return r;
}

inline Jet operator/(const Jet& a, const Jet& b) {
  if (b.value() == 0.0) throw eval_domain_error("division by zero in jet evaluation");
  const int K = a.order();
  Jet q(a.base(), K);
  for (int k = 0; k <= K; ++k) {
    double s = a.coeff(k);
    for (int i = 0; i < k; ++i) s -= q.coeff(i) * b.coeff(k - i);
    q.coeff(k) = s / b.value();
  }
  return q;
}

inline Jet jet_scale(const Jet& a, double lambda) {
  Jet r = a;
  for (int k = 0; k <= r.order(); ++k) r.coeff(k) *= lambda;
  return r;
}

inline Jet jet_exp(const Jet& a) {
  const int K = a.order();
  Jet e(a.base(), K);
  e.coeff(0) = std::exp(a.value());
  for (int k = 1; k <= K; ++k) {
    double s = 0.0;
    for (int j = 1; j <= k; ++j) s += j * a.coeff(j) * e.coeff(k - j);
    e.coeff(k) = s / k;
  }
  return e;
}

/// sin and cos propagate together (they are each other's derivative chain).
inline void jet_sincos(const Jet& a, Jet& s, Jet& c) {
  const int K = a.order();
  s = Jet(a.base(), K);
  c = Jet(a.base(), K);
  s.coeff(0) = std::sin(a.value());
  c.coeff(0) = std::cos(a.value());
  for (int k = 1; k <= K; ++k) {
    double ss = 0.0, cs = 0.0;
    for (int j = 1; j <= k; ++j) {
      ss += j * a.coeff(j) * c.coeff(k - j);
      cs += j * a.coeff(j) * s.coeff(k - j);
    }
    s.coeff(k) = ss / k;
    c.coeff(k) = -cs / k;
  }
}

inline Jet jet_sin(const Jet& a) {
  Jet s, c;
  jet_sincos(a, s, c);
  return s;
}

inline Jet jet_cos(const Jet& a) {
  Jet s, c;
  jet_sincos(a, s, c);
  return c;
}

/// a^r for real exponent; requires a positive leading value.
/// Recurrence from a w' = r a' w.
inline Jet jet_pow_real(const Jet& a, double r) {
  if (a.value() <= 0.0)
    throw eval_domain_error("fractional power of non-positive base in jet evaluation");
  const int K = a.order();
  Jet w(a.base(), K);
  w.coeff(0) = std::pow(a.value(), r);
  for (int k = 1; k <= K; ++k) {
    double s = 0.0;
    for (int m = 1; m <= k; ++m) s += (r * m - (k - m)) * a.coeff(m) * w.coeff(k - m);
    w.coeff(k) = s / (k * a.value());
  }
  return w;
}

/// Integer power by binary exponentiation; exact at any base value.
inline Jet jet_pow_int(const Jet& a, int n) {
  const int K = a.order();
  if (n == 0) return Jet::constant(1.0, a.base(), K);
  bool neg = n < 0;
  unsigned m = neg ? static_cast<unsigned>(-static_cast<long long>(n)) : static_cast<unsigned>(n);
  Jet acc = Jet::constant(1.0, a.base(), K);
  Jet p = a;
  while (m != 0) {
    if (m & 1u) acc = acc * p;
    m >>= 1;
    if (m != 0) p = p * p;
  }
  if (neg) return Jet::constant(1.0, a.base(), K) / acc;
  return acc;
}

/// |x|^q for q > 0.  Smooth away from 0; at 0 only finitely many
/// derivatives exist unless q is an even integer.
inline Jet jet_abs_pow(const Jet& a, double q) {
  const int K = a.order();
  double rounded = std::round(q);
  bool integral = std::abs(q - rounded) < 1e-12 && std::abs(rounded) < 1e15;
  if (a.value() > 0.0) return integral ? jet_pow_int(a, static_cast<int>(rounded)) : jet_pow_real(a, q);
  if (a.value() < 0.0) {
    Jet na = -a;
    return integral ? jet_pow_int(na, static_cast<int>(rounded)) : jet_pow_real(na, q);
  }
  // Base point at the kink.
  if (integral) {
    int n = static_cast<int>(rounded);
    if (n % 2 == 0) return jet_pow_int(a, n);  // |x|^even is a polynomial
    if (K >= n)
      throw eval_domain_error("abs-power |x|^" + std::to_string(q) +
                              " is not C^" + std::to_string(K) + " at 0");
  } else if (K > static_cast<int>(std::floor(q))) {
    throw eval_domain_error("abs-power |x|^" + std::to_string(q) +
                            " is not C^" + std::to_string(K) + " at 0");
  }
  return Jet(a.base(), K);  // all existing derivatives vanish
}

/// exp(-1/x^2) extended by 0 at x = 0.  The jet at a root of the inner
/// expression is identically zero: the bump is flat to all orders.
inline Jet jet_flat_bump(const Jet& a) {
  const int K = a.order();
  if (a.value() == 0.0) return Jet(a.base(), K);
  Jet inv2 = Jet::constant(1.0, a.base(), K) / (a * a);
  return jet_exp(-inv2);
}

}  // namespace conslaw
