#pragma once

#include <cmath>
#include <functional>
#include <vector>

// Independent quadrature oracle: Gauss-Legendre nodes by Newton
// iteration on the Legendre recurrence, tensorized for the mu-kernel
// defining integral.  Never calls the library's closed forms.
namespace oracle {

struct GaussLegendre {
  std::vector<double> x, w;  // on [0, 1]
  explicit GaussLegendre(int n) {
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < n; ++i) {
      // initial guess (Chebyshev), Newton on P_n
      double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = t;
        for (int k = 2; k <= n; ++k) {
          double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        double dp = n * (t * p1 - p0) / (t * t - 1.0);
        double dt = p1 / dp;
        t -= dt;
        if (std::abs(dt) < 1e-15) break;
      }
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (t * p1 - p0) / (t * t - 1.0);
      x[static_cast<std::size_t>(i)] = 0.5 * (1.0 - t);  // map [-1,1] -> [0,1], reversed is fine
      w[static_cast<std::size_t>(i)] = 1.0 / ((1.0 - t * t) * dp * dp);
    }
  }
};

/// Direct quadrature of the defining integral of mu_{d,sigma}(t1) over
/// the unit cube in (t2, ..., td).
inline double mu_integral(int d, double sigma, double t1, int n = 64) {
  GaussLegendre gl(n);
  if (d == 2) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      s += gl.w[static_cast<std::size_t>(i)] *
           std::pow(t1 / (t1 + gl.x[static_cast<std::size_t>(i)]), 1.0 + sigma) /
           ((t1 + gl.x[static_cast<std::size_t>(i)]) * 1.0);
    // integrand: t1^(1+sigma) / (t1 + t2)^(2+sigma)
    return s;
  }
  if (d == 3) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double den = t1 + gl.x[static_cast<std::size_t>(i)] + gl.x[static_cast<std::size_t>(j)];
        s += gl.w[static_cast<std::size_t>(i)] * gl.w[static_cast<std::size_t>(j)] *
             std::pow(t1, 1.0 + sigma) / std::pow(den, 3.0 + sigma);
      }
    return s;
  }
  return 1.0;  // d = 1 by convention
}

/// O(N^2) double Riemann sum of the periodic tilde seminorm: x over the
/// full box (2A an integer number of periods), shifts h = j/N with
/// |h| <= A, trapezoid in h, and the same sub-grid head model as the
/// kernel path (shared analytic formula, independent summation path).
inline double brute_seminorm_1d(const std::vector<double>& v, double s, double p, double A,
                                double head_exponent) {
  const int n = static_cast<int>(v.size());
  const double sp = s * p;
  const long jmax = static_cast<long>(std::llround(A * n));
  std::vector<double> f(static_cast<std::size_t>(jmax) + 1, 0.0);
  for (long j = 1; j <= jmax; ++j) {
    double inner = 0.0;  // direct x sum over one period (box = whole periods)
    for (int i = 0; i < n; ++i) {
      double d = std::abs(v[static_cast<std::size_t>((i + j) % n)] - v[static_cast<std::size_t>(i)]);
      inner += (p == 1.0) ? d : std::pow(d, p);
    }
    inner *= 2.0 * A / n;  // box length times the mean
    double H = static_cast<double>(j) / n;
    f[static_cast<std::size_t>(j)] = inner * std::pow(H, -1.0 - sp);
  }
  double integral = 0.0;
  for (long j = 1; j < jmax; ++j)
    integral += 0.5 * (f[static_cast<std::size_t>(j)] + f[static_cast<std::size_t>(j) + 1]) / n;
  // head [0, 1/N] with the declared power model
  double H1 = 1.0 / n;
  integral += f[1] * H1 / (head_exponent - sp);
  return std::pow(2.0 * integral, 1.0 / p);  // both shift signs
}

}  // namespace oracle
