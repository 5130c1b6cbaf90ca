#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "conslaw/flux.hpp"
#include "conslaw/util.hpp"

namespace conslaw {

// ---------------------------------------------------------------------------
// Reduced 1-D profile flux psi and its first two derivatives.
// ---------------------------------------------------------------------------

/// Flux of the periodic profile equation  dU/dt + d(psi(U))/dtheta = 0.
///
/// Exact provenance:  psi_eps(U) = eps^(-1-gamma) (v.F(ubar + eps U) -
/// v.F(ubar)) - eps^(-gamma) (a(ubar).v) U, evaluated directly from the
/// flux tree (no Taylor truncation).
/// Limit provenance:  psi(U) = b U^(q+1).
struct ProfileFlux {
  std::function<double(double)> psi;
  std::function<double(double)> dpsi;
  std::function<double(double)> ddpsi;
  std::string provenance;
};

inline ProfileFlux limit_profile_flux(double b, int q) {
  ProfileFlux f;
  f.psi = [b, q](double u) { return b * std::pow(u, q + 1); };
  f.dpsi = [b, q](double u) { return b * (q + 1) * std::pow(u, q); };
  f.ddpsi = [b, q](double u) { return q >= 1 ? b * q * (q + 1) * std::pow(u, q - 1) : 0.0; };
  f.provenance = "limit b=" + std::to_string(b) + " q=" + std::to_string(q);
  return f;
}

/// The limit coefficient b = (a^(q)(ubar).v) / (q+1)!  when gamma = q,
/// and 0 for non-integer gamma < q.
inline double limit_profile_coefficient(const Flux& flux, double ubar,
                                        const std::vector<double>& v, double gamma, int q) {
  if (std::abs(gamma - q) > 1e-12) return 0.0;
  auto derivs = flux.velocity_derivatives(ubar, q);
  double av = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) av += derivs[static_cast<std::size_t>(q)][i] * v[i];
  double fact = 1.0;
  for (int i = 2; i <= q + 1; ++i) fact *= i;
  return av / fact;
}

inline ProfileFlux psi_eps(const Flux& flux, double ubar, const std::vector<double>& v,
                           double gamma, double eps) {
  if (eps <= 0.0 || eps > 1.0) throw std::invalid_argument("psi_eps: eps must be in (0, 1]");
  double vnorm = 0.0;
  for (double x : v) vnorm += x * x;
  if (vnorm == 0.0) throw std::invalid_argument("psi_eps: v must be nonzero");
  const int d = flux.dim();
  if (static_cast<int>(v.size()) != d) throw std::invalid_argument("psi_eps: v has wrong dimension");

  // frozen-state quantities
  double vF0 = 0.0, av0 = 0.0;
  for (int i = 0; i < d; ++i) {
    Jet j = flux.component_jet(i, ubar, 1);
    vF0 += v[static_cast<std::size_t>(i)] * j.value();
    av0 += v[static_cast<std::size_t>(i)] * j.derivative(1);
  }
  const double s1 = std::pow(eps, -1.0 - gamma);
  const double s0 = std::pow(eps, -gamma);
  const double sm1 = std::pow(eps, 1.0 - gamma);

  ProfileFlux f;
  f.psi = [flux, ubar, v, eps, vF0, av0, s1, s0](double U) {
    double vF = 0.0;
    for (int i = 0; i < flux.dim(); ++i)
      vF += v[static_cast<std::size_t>(i)] * flux.component(i)(ubar + eps * U);
    return s1 * (vF - vF0) - s0 * av0 * U;
  };
  f.dpsi = [flux, ubar, v, eps, av0, s0](double U) {
    double av = 0.0;
    for (int i = 0; i < flux.dim(); ++i)
      av += v[static_cast<std::size_t>(i)] * flux.component_jet(i, ubar + eps * U, 1).derivative(1);
    return s0 * (av - av0);
  };
  f.ddpsi = [flux, ubar, v, eps, sm1](double U) {
    double apv = 0.0;
    for (int i = 0; i < flux.dim(); ++i)
      apv += v[static_cast<std::size_t>(i)] * flux.component_jet(i, ubar + eps * U, 2).derivative(2);
    return sm1 * apv;
  };
  f.provenance = "exact flux=" + flux.name() + " ubar=" + std::to_string(ubar) +
                 " gamma=" + std::to_string(gamma) + " eps=" + std::to_string(eps);
  return f;
}

// ---------------------------------------------------------------------------
// Profile data and fields.
// ---------------------------------------------------------------------------

/// Periodic initial profile.  Analytic sources carry an exact
/// derivative (from jets); sampled sources fall back to centered
/// differences on their grid.
struct ProfileData {
  std::function<double(double)> value;     // 1-periodic
  std::function<double(double)> deriv;     // d/dtheta, 1-periodic
  std::string desc;
};

inline ProfileData profile_from_expr(const Expr& e, std::string desc = "") {
  ProfileData p;
  p.value = [e](double th) { return e(frac(th)); };
  p.deriv = [e](double th) { return e.jet(frac(th), 1).derivative(1); };
  p.desc = desc.empty() ? e.str() : std::move(desc);
  return p;
}

inline ProfileData profile_from_samples(std::vector<double> samples, std::string desc) {
  auto s = std::make_shared<std::vector<double>>(std::move(samples));
  const int n = static_cast<int>(s->size());
  ProfileData p;
  p.value = [s, n](double th) {
    double x = frac(th) * n;
    int i = static_cast<int>(x);
    double w = x - i;
    return (*s)[static_cast<std::size_t>(i % n)] * (1.0 - w) +
           (*s)[static_cast<std::size_t>((i + 1) % n)] * w;
  };
  p.deriv = [s, n](double th) {
    double x = frac(th) * n;
    int i = static_cast<int>(std::lround(x)) % n;
    double up = (*s)[static_cast<std::size_t>((i + 1) % n)];
    double dn = (*s)[static_cast<std::size_t>((i - 1 + n) % n)];
    return 0.5 * (up - dn) * n;
  };
  p.desc = std::move(desc);
  return p;
}

enum class ProfileSolver { Characteristics, FiniteVolume };

/// Samples of the profile at cell centers (j + 1/2)/n on [0, 1).
struct ProfileField {
  int n = 0;
  double t = 0.0;
  std::vector<double> values;
  ProfileSolver solver = ProfileSolver::FiniteVolume;
  bool shock = false;

  double theta(int j) const { return (j + 0.5) / n; }
};

/// Cell-average mean (pairwise summation keeps 1e-12 over long runs).
inline double mean_value(const ProfileField& f) { return pairwise_mean(f.values); }

inline double l1_distance(const ProfileField& a, const ProfileField& b) {
  if (a.n != b.n) throw std::invalid_argument("l1_distance: grids differ");
  double s = 0.0;
  for (int j = 0; j < a.n; ++j)
    s += std::abs(a.values[static_cast<std::size_t>(j)] - b.values[static_cast<std::size_t>(j)]);
  return s / a.n;
}

// ---------------------------------------------------------------------------
// Shock time.
// ---------------------------------------------------------------------------

/// T* = 1 / sup_theta max(0, -psi''(U0) U0'); +infinity when the sup is
/// non-positive (no compression anywhere).
inline double shock_time(const ProfileFlux& psi, const ProfileData& u0, int n = 1 << 14) {
  double sup = 0.0;
  for (int j = 0; j < n; ++j) {
    double th = static_cast<double>(j) / n;
    double c = -psi.ddpsi(u0.value(th)) * u0.deriv(th);
    sup = std::max(sup, c);
  }
  if (sup <= 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / sup;
}

/// Largest backward life span: smooth solutions extend to negative
/// times until the characteristics cross there, at
/// 1 / sup max(0, +psi''(U0) U0').
inline double shock_time_backward(const ProfileFlux& psi, const ProfileData& u0, int n = 1 << 14) {
  double sup = 0.0;
  for (int j = 0; j < n; ++j) {
    double th = static_cast<double>(j) / n;
    double c = psi.ddpsi(u0.value(th)) * u0.deriv(th);
    sup = std::max(sup, c);
  }
  if (sup <= 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / sup;
}

// ---------------------------------------------------------------------------
// Method of characteristics (pre-shock).
// ---------------------------------------------------------------------------

class characteristics_error : public std::runtime_error {
 public:
  explicit characteristics_error(const std::string& w) : std::runtime_error(w) {}
};

/// Solves U(t, Theta(t, theta)) = U0(theta) with Theta = theta +
/// t psi'(U0(theta)) by inverting the strictly increasing map Theta:
/// bisection bracket plus Newton polish to |Theta - target| <= 1e-12.
inline ProfileField solve_characteristics(const ProfileFlux& psi, const ProfileData& u0, double t,
                                          int n_out) {
  if (t >= 0.0) {
    double tstar = shock_time(psi, u0);
    if (!(t < 0.95 * tstar))
      throw characteristics_error("characteristics requested at t >= 0.95 T*");
  } else {
    // negative times: smooth data extends backward until the reversed
    // compression crosses
    double tback = shock_time_backward(psi, u0);
    if (!(-t < 0.95 * tback))
      throw characteristics_error("characteristics requested at t <= -0.95 backward T*");
  }

  ProfileField out;
  out.n = n_out;
  out.t = t;
  out.solver = ProfileSolver::Characteristics;
  out.values.resize(static_cast<std::size_t>(n_out));
  if (t == 0.0) {
    for (int j = 0; j < n_out; ++j) out.values[static_cast<std::size_t>(j)] = u0.value(out.theta(j));
    return out;
  }

  // speed range for the bracket
  double cmin = std::numeric_limits<double>::infinity(), cmax = -cmin;
  const int m = 4096;
  for (int j = 0; j < m; ++j) {
    double c = psi.dpsi(u0.value(static_cast<double>(j) / m));
    cmin = std::min(cmin, c);
    cmax = std::max(cmax, c);
  }

  auto theta_map = [&](double th) { return th + t * psi.dpsi(u0.value(th)); };
  for (int j = 0; j < n_out; ++j) {
    const double target = out.theta(j);
    double lo = target - std::max(t * cmax, t * cmin) - 1e-9;
    double hi = target - std::min(t * cmax, t * cmin) + 1e-9;
    double flo = theta_map(lo) - target, fhi = theta_map(hi) - target;
    if (flo > 0.0 || fhi < 0.0)
      throw characteristics_error("characteristic map not monotone (T* underestimated?)");
    double a = lo, b = hi;
    double x = 0.5 * (a + b);
    for (int it = 0; it < 200; ++it) {
      double fx = theta_map(x) - target;
      if (std::abs(fx) <= 1e-12) break;
      if (fx > 0.0) b = x;
      else a = x;
      // Newton polish with bisection fallback
      double slope = 1.0 + t * psi.ddpsi(u0.value(x)) * u0.deriv(x);
      double xn = (slope > 1e-12) ? x - fx / slope : 0.5 * (a + b);
      x = (xn > a && xn < b) ? xn : 0.5 * (a + b);
    }
    out.values[static_cast<std::size_t>(j)] = u0.value(x);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Engquist-Osher finite-volume scheme on the periodic cell [0, 1).
// ---------------------------------------------------------------------------

/// Split fluxes psi+ / psi- tabulated over the data range: psi+(u) =
/// psi(lo) + integral of max(psi', 0), psi-(u) = integral of min(psi',
/// 0), both from lo.  The integrals are exact for the piecewise-linear
/// interpolant of psi' (sign crossings split analytically), stored
/// cumulatively and evaluated by linear interpolation.  Monotonicity of
/// the numerical flux is preserved by construction.
class SplitFluxTable {
 public:
  SplitFluxTable(const ProfileFlux& psi, double lo, double hi, int nodes = 4096) {
    if (!(hi > lo)) {
      // constant data; widen artificially so evaluation stays defined
      hi = lo + 1.0;
    }
    double pad = 1e-9 * (hi - lo);
    lo_ = lo - pad;
    hi_ = hi + pad;
    n_ = nodes;
    dx_ = (hi_ - lo_) / n_;
    dp_.resize(static_cast<std::size_t>(n_) + 1);
    plus_.resize(static_cast<std::size_t>(n_) + 1);
    minus_.resize(static_cast<std::size_t>(n_) + 1);
    for (int k = 0; k <= n_; ++k) dp_[static_cast<std::size_t>(k)] = psi.dpsi(lo_ + k * dx_);
    plus_[0] = psi.psi(lo_);
    minus_[0] = 0.0;
    max_speed_ = 0.0;
    for (int k = 0; k < n_; ++k) {
      double a = dp_[static_cast<std::size_t>(k)], b = dp_[static_cast<std::size_t>(k) + 1];
      max_speed_ = std::max({max_speed_, std::abs(a), std::abs(b)});
      double ip = 0.0, im = 0.0;  // integrals of max(.,0), min(.,0) over the cell
      if (a >= 0.0 && b >= 0.0) {
        ip = 0.5 * (a + b) * dx_;
      } else if (a <= 0.0 && b <= 0.0) {
        im = 0.5 * (a + b) * dx_;
      } else {
        double root = dx_ * a / (a - b);  // linear crossing inside the cell
        if (a > 0.0) {
          ip = 0.5 * a * root;
          im = 0.5 * b * (dx_ - root);
        } else {
          im = 0.5 * a * root;
          ip = 0.5 * b * (dx_ - root);
        }
      }
      plus_[static_cast<std::size_t>(k) + 1] = plus_[static_cast<std::size_t>(k)] + ip;
      minus_[static_cast<std::size_t>(k) + 1] = minus_[static_cast<std::size_t>(k)] + im;
    }
  }

  double plus(double u) const { return interp(plus_, u); }
  double minus(double u) const { return interp(minus_, u); }
  double max_speed() const { return max_speed_; }

 private:
  double lo_ = 0.0, hi_ = 0.0, dx_ = 0.0;
  int n_ = 0;
  double max_speed_ = 0.0;
  std::vector<double> dp_, plus_, minus_;

  double interp(const std::vector<double>& tab, double u) const {
    double x = (u - lo_) / dx_;
    if (x <= 0.0) return tab.front();
    if (x >= n_) return tab.back();
    int k = static_cast<int>(x);
    double w = x - k;
    return tab[static_cast<std::size_t>(k)] * (1.0 - w) + tab[static_cast<std::size_t>(k) + 1] * w;
  }
};

class cfl_error : public std::runtime_error {
 public:
  explicit cfl_error(const std::string& w) : std::runtime_error(w) {}
};

struct FvOptions {
  double cfl = 0.5;
  int flux_table_nodes = 4096;
};

/// Marches the periodic profile law with the Engquist-Osher flux
/// psi+(U_L) + psi-(U_R) and returns the fields at the requested output
/// times (sorted ascending).  The scheme is monotone, so it obeys the
/// max principle and converges to the entropy solution; conservation of
/// the mean is telescoping-exact per step.
inline std::vector<ProfileField> solve_entropy_fv(const ProfileFlux& psi,
                                                  const std::vector<double>& init,
                                                  std::vector<double> output_times,
                                                  FvOptions opt = {}) {
  const int n = static_cast<int>(init.size());
  if (n < 64) throw std::invalid_argument("solve_entropy_fv: need at least 64 cells");
  if (!(opt.cfl > 0.0 && opt.cfl <= 0.9))
    throw std::invalid_argument("solve_entropy_fv: cfl must lie in (0, 0.9]");
  std::sort(output_times.begin(), output_times.end());

  double lo = *std::min_element(init.begin(), init.end());
  double hi = *std::max_element(init.begin(), init.end());
  SplitFluxTable table(psi, lo, hi, opt.flux_table_nodes);

  const double dth = 1.0 / n;
  double dt_base = opt.cfl * dth / std::max(table.max_speed(), 1e-300);

  std::vector<double> u = init;
  std::vector<double> fp(static_cast<std::size_t>(n)), fm(static_cast<std::size_t>(n));
  std::vector<ProfileField> out;
  double t = 0.0;
  for (double target : output_times) {
    if (target < t) throw std::invalid_argument("solve_entropy_fv: negative output time");
    while (t < target - 1e-15) {
      double dt = std::min(dt_base, target - t);
      for (int j = 0; j < n; ++j) {
        fp[static_cast<std::size_t>(j)] = table.plus(u[static_cast<std::size_t>(j)]);
        fm[static_cast<std::size_t>(j)] = table.minus(u[static_cast<std::size_t>(j)]);
      }
      double lambda = dt / dth;
      static thread_local std::vector<double> unew;
      unew.resize(static_cast<std::size_t>(n));
      for (int j = 0; j < n; ++j) {
        int jp = (j + 1) % n;
        double flux_r = fp[static_cast<std::size_t>(j)] + fm[static_cast<std::size_t>(jp)];
        int jm = (j - 1 + n) % n;
        double flux_l = fp[static_cast<std::size_t>(jm)] + fm[static_cast<std::size_t>(j)];
        unew[static_cast<std::size_t>(j)] = u[static_cast<std::size_t>(j)] - lambda * (flux_r - flux_l);
        if (!std::isfinite(unew[static_cast<std::size_t>(j)]))
          throw cfl_error("non-finite cell value during finite-volume march");
      }
      u.swap(unew);
      t += dt;
    }
    ProfileField f;
    f.n = n;
    f.t = target;
    f.values = u;
    f.solver = ProfileSolver::FiniteVolume;
    out.push_back(std::move(f));
  }
  return out;
}

inline std::vector<double> sample_cells(const ProfileData& u0, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) v[static_cast<std::size_t>(j)] = u0.value((j + 0.5) / n);
  return v;
}

// ---------------------------------------------------------------------------
// Shock detection from the finite-volume march.
// ---------------------------------------------------------------------------

/// Detects gradient blow-up in a finite-volume run: the first time the
/// discrete gradient reaches a fixed fraction of the maximal
/// representable jump (data range / cell width).  Smooth solutions
/// cannot reach that threshold, and past T* the gradient shoots up to
/// it within a few cells' worth of time, so the crossing time tracks
/// the true shock time.  Infinity marker when no crossing occurs by
/// t_max.
inline double shock_time_fv(const ProfileFlux& psi, const ProfileData& u0, double t_max,
                            int n = 2048, double cfl = 0.45, double threshold = 0.25) {
  auto init = sample_cells(u0, n);
  double lo = *std::min_element(init.begin(), init.end());
  double hi = *std::max_element(init.begin(), init.end());
  double range = hi - lo;
  if (range <= 0.0) return std::numeric_limits<double>::infinity();
  SplitFluxTable table(psi, lo, hi);
  const double dth = 1.0 / n;
  double dt = cfl * dth / std::max(table.max_speed(), 1e-300);
  const double g_shock = threshold * range / dth;

  std::vector<double> u = init;
  std::vector<double> unew(static_cast<std::size_t>(n)), fp(static_cast<std::size_t>(n)),
      fm(static_cast<std::size_t>(n));
  double t = 0.0;
  while (t < t_max) {
    for (int j = 0; j < n; ++j) {
      fp[static_cast<std::size_t>(j)] = table.plus(u[static_cast<std::size_t>(j)]);
      fm[static_cast<std::size_t>(j)] = table.minus(u[static_cast<std::size_t>(j)]);
    }
    double lambda = dt / dth;
    for (int j = 0; j < n; ++j) {
      int jp = (j + 1) % n, jm = (j - 1 + n) % n;
      unew[static_cast<std::size_t>(j)] =
          u[static_cast<std::size_t>(j)] -
          lambda * (fp[static_cast<std::size_t>(j)] + fm[static_cast<std::size_t>(jp)] -
                    fp[static_cast<std::size_t>(jm)] - fm[static_cast<std::size_t>(j)]);
    }
    u.swap(unew);
    t += dt;
    double g = 0.0;
    for (int j = 0; j < n; ++j)
      g = std::max(g, std::abs(u[static_cast<std::size_t>((j + 1) % n)] - u[static_cast<std::size_t>(j)]) / dth);
    if (g >= g_shock) return t;
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace conslaw
