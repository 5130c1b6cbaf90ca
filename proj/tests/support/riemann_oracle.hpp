#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

// Exact self-similar Riemann solution for a scalar conservation law
// with arbitrary (possibly nonconvex) flux, via the classical envelope
// construction: lower convex envelope of psi on [u_l, u_r] when
// u_l < u_r, upper concave envelope on [u_r, u_l] when u_l > u_r.
// The solution at xi = x/t is the state whose envelope slope equals xi.
namespace oracle {

class RiemannSolution {
 public:
  RiemannSolution(const std::function<double(double)>& psi, double ul, double ur, int n = 4001) {
    double lo = std::min(ul, ur), hi = std::max(ul, ur);
    bool decreasing = ul > ur;  // envelope traversed from ul to ur
    std::vector<double> us(static_cast<std::size_t>(n)), fs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      us[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
      fs[static_cast<std::size_t>(i)] = psi(us[static_cast<std::size_t>(i)]);
    }
    // Andrew monotone chain for the required envelope over the graph
    std::vector<int> hull;
    auto cross = [&](int o, int a, int b) {
      return (us[static_cast<std::size_t>(a)] - us[static_cast<std::size_t>(o)]) *
                 (fs[static_cast<std::size_t>(b)] - fs[static_cast<std::size_t>(o)]) -
             (fs[static_cast<std::size_t>(a)] - fs[static_cast<std::size_t>(o)]) *
                 (us[static_cast<std::size_t>(b)] - us[static_cast<std::size_t>(o)]);
    };
    for (int i = 0; i < n; ++i) {
      while (hull.size() >= 2) {
        double c = cross(hull[hull.size() - 2], hull.back(), i);
        bool pop = decreasing ? (c >= 0.0) : (c <= 0.0);  // concave vs convex
        if (!pop) break;
        hull.pop_back();
      }
      hull.push_back(i);
    }
    // envelope vertices in increasing u; wave speeds along segments
    for (std::size_t k = 0; k + 1 < hull.size(); ++k) {
      int a = hull[k], b = hull[k + 1];
      double s = (fs[static_cast<std::size_t>(b)] - fs[static_cast<std::size_t>(a)]) /
                 (us[static_cast<std::size_t>(b)] - us[static_cast<std::size_t>(a)]);
      seg_u0_.push_back(us[static_cast<std::size_t>(a)]);
      seg_u1_.push_back(us[static_cast<std::size_t>(b)]);
      seg_speed_.push_back(s);
    }
    ul_ = ul;
    ur_ = ur;
    decreasing_ = decreasing;
  }

  /// State at similarity variable xi = x/t.
  double operator()(double xi) const {
    // as xi grows the state moves from ul to ur through waves of
    // increasing speed; envelope slopes are monotone along the traversal
    if (decreasing_) {
      // concave envelope: slope decreases in u, so increasing xi visits
      // the segments from the u_l end (high u) downward
      double state = ul_;
      for (std::size_t k = seg_speed_.size(); k-- > 0;) {
        double s = seg_speed_[k];
        if (xi < s) return state;
        state = seg_u0_[k];
      }
      return ur_;
    }
    double state = ul_;
    for (std::size_t k = 0; k < seg_speed_.size(); ++k) {
      double s = seg_speed_[k];
      if (xi < s) return state;
      state = seg_u1_[k];
    }
    return ur_;
  }

 private:
  std::vector<double> seg_u0_, seg_u1_, seg_speed_;
  double ul_ = 0.0, ur_ = 0.0;
  bool decreasing_ = false;
};

}  // namespace oracle
