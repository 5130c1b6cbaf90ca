#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace conslaw {

/// Log-log least-squares fit used everywhere an exponent is estimated.
struct ScalingFit {
  std::vector<std::pair<double, double>> points;  // (log x, log y)
  double slope = 0.0;
  double intercept = 0.0;
  double max_residual = 0.0;
  bool empty = false;   // no positive data to fit
  bool exact = false;   // all values at the numerical noise floor
};

/// Least squares of log y on log x.  Pairs with y <= 0 are rejected.
inline ScalingFit fit_log_log(const std::vector<std::pair<double, double>>& xy) {
  ScalingFit fit;
  for (auto [x, y] : xy) {
    if (x <= 0.0) throw std::invalid_argument("fit_log_log: non-positive abscissa");
    if (y <= 0.0) throw std::invalid_argument("fit_log_log: non-positive value");
    fit.points.emplace_back(std::log(x), std::log(y));
  }
  const std::size_t n = fit.points.size();
  if (n < 2) {
    fit.empty = true;
    return fit;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [lx, ly] : fit.points) {
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double dn = static_cast<double>(n);
  const double det = dn * sxx - sx * sx;
  if (det == 0.0) {
    fit.empty = true;
    return fit;
  }
  fit.slope = (dn * sxy - sx * sy) / det;
  fit.intercept = (sy * sxx - sx * sxy) / det;
  for (auto [lx, ly] : fit.points)
    fit.max_residual = std::max(fit.max_residual, std::abs(ly - (fit.intercept + fit.slope * lx)));
  return fit;
}

/// Fit of (epsilon, value) pairs plus the sandwich ratio
/// max(value * eps^beta) / min(value * eps^beta) for a caller-supplied
/// beta (a bounded ratio certifies value ~ eps^-beta).
struct EpsScalingFit {
  ScalingFit fit;
  double sandwich_ratio = std::numeric_limits<double>::quiet_NaN();
};

inline EpsScalingFit fit_scaling(const std::vector<std::pair<double, double>>& eps_value,
                                 double beta = std::numeric_limits<double>::quiet_NaN()) {
  if (eps_value.size() < 4) throw std::invalid_argument("fit_scaling: need at least 4 pairs");
  for (std::size_t i = 1; i < eps_value.size(); ++i)
    if (eps_value[i].first >= eps_value[i - 1].first)
      throw std::invalid_argument("fit_scaling: epsilon must be strictly decreasing");
  EpsScalingFit out;
  out.fit = fit_log_log(eps_value);
  if (!std::isnan(beta)) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (auto [e, v] : eps_value) {
      double scaled = v * std::pow(e, beta);
      lo = std::min(lo, scaled);
      hi = std::max(hi, scaled);
    }
    out.sandwich_ratio = hi / lo;
  }
  return out;
}

}  // namespace conslaw
