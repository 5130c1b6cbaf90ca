#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

// Independent derivative oracle: central finite differences with full
// Richardson (Ridders-style) extrapolation.  Used to cross-check jet
// evaluation; never calls into the jet machinery.
namespace oracle {

inline double central_diff(const std::function<double(double)>& f, double u, int k, double h) {
  // k-th central difference via binomial weights on the stencil
  // u + (k/2 - j) h, j = 0..k.
  long double sum = 0.0L;
  long double binom = 1.0L;
  for (int j = 0; j <= k; ++j) {
    double x = u + (0.5 * k - j) * h;
    sum += ((j % 2 == 0) ? 1.0L : -1.0L) * binom * static_cast<long double>(f(x));
    binom = binom * (k - j) / (j + 1);
  }
  return static_cast<double>(sum / std::pow(static_cast<long double>(h), k));
}

/// k-th derivative by Richardson extrapolation of central differences.
/// Shrinks the step by sqrt(2) per level (so the leading h^2 error
/// halves) and returns the tableau entry with the smallest error
/// estimate before round-off takes over.
inline double derivative(const std::function<double(double)>& f, double u, int k,
                         double h0 = 0.1) {
  if (k == 0) return f(u);
  const int levels = 14;
  std::vector<std::vector<double>> T(levels);
  double best = std::numeric_limits<double>::quiet_NaN();
  double best_err = std::numeric_limits<double>::infinity();
  double h = h0;
  const double ratio2 = 2.0;  // (sqrt 2)^2: factor for the h^2 expansion
  for (int i = 0; i < levels; ++i, h /= std::sqrt(2.0)) {
    T[i].resize(i + 1);
    T[i][0] = central_diff(f, u, k, h);
    double fac = ratio2;
    for (int j = 1; j <= i; ++j, fac *= ratio2) {
      T[i][j] = (fac * T[i][j - 1] - T[i - 1][j - 1]) / (fac - 1.0);
      double err = std::max(std::abs(T[i][j] - T[i][j - 1]), std::abs(T[i][j] - T[i - 1][j - 1]));
      if (err <= best_err) {
        best_err = err;
        best = T[i][j];
      }
    }
    // once the diagonal diverges, smaller steps only add round-off;
    // insist on several levels first so a coincidental agreement at
    // coarse h cannot freeze the tableau outside the asymptotic regime
    if (i >= 6 && std::abs(T[i][i] - T[i - 1][i - 1]) >= 4.0 * best_err + 1e-300) break;
  }
  return best;
}

}  // namespace oracle
