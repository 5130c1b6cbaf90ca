#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "conslaw/parser.hpp"

namespace conslaw {

/// Vector-valued flux F : R -> R^d as exact expression trees.  The
/// velocity is a = F' and a^(k) = F^(k+1); everything downstream only
/// ever sees derivatives produced by jet evaluation.
///
/// Immutable after construction; all member functions are const and
/// safe to call concurrently.
class Flux {
 public:
  Flux() = default;
  Flux(std::vector<Expr> components, std::string name)
      : components_(std::move(components)), name_(std::move(name)) {}

  int dim() const { return static_cast<int>(components_.size()); }
  const std::string& name() const { return name_; }
  const std::vector<Expr>& components() const { return components_; }
  const Expr& component(int i) const { return components_[static_cast<std::size_t>(i)]; }

  /// Optional smoothness annotation: the flux is only C^k at isolated
  /// points (abs-powers).  Informational, never enforced.
  std::optional<int> smoothness_class() const {
    std::optional<int> k;
    for (const auto& c : components_) scan_smoothness(c.node(), k);
    return k;
  }

  /// Jet of component i at u (coefficients c_k = F_i^(k)(u)/k!).
  Jet component_jet(int i, double u, int order) const {
    return components_[static_cast<std::size_t>(i)].jet(u, order);
  }

  /// F(u) evaluated componentwise.
  std::vector<double> value(double u) const {
    std::vector<double> v(components_.size());
    for (std::size_t i = 0; i < components_.size(); ++i) v[i] = components_[i](u);
    return v;
  }

  /// Velocity derivatives a^(k)(u) = F^(k+1)(u) for k = 0..kmax.
  /// Entry k is a d-vector.
  std::vector<std::vector<double>> velocity_derivatives(double u, int kmax) const {
    const int d = dim();
    std::vector<std::vector<double>> out(static_cast<std::size_t>(kmax) + 1,
                                         std::vector<double>(static_cast<std::size_t>(d)));
    for (int i = 0; i < d; ++i) {
      Jet j = component_jet(i, u, kmax + 1);
      for (int k = 0; k <= kmax; ++k) out[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] =
          j.derivative(k + 1);
    }
    return out;
  }

  /// a(u) = F'(u).
  std::vector<double> velocity(double u) const {
    const int d = dim();
    std::vector<double> v(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) v[static_cast<std::size_t>(i)] = component_jet(i, u, 1).derivative(1);
    return v;
  }

  std::string str() const {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < components_.size(); ++i) {
      if (i) os << ", ";
      os << components_[i].str();
    }
    os << ']';
    return os.str();
  }

 private:
  std::vector<Expr> components_;
  std::string name_;

  static void scan_smoothness(const ExprNode& n, std::optional<int>& k) {
    if (n.kind == NodeKind::AbsPow) {
      double q = n.rexp;
      double rounded = std::round(q);
      bool even_int = std::abs(q - rounded) < 1e-12 && static_cast<long long>(rounded) % 2 == 0;
      if (!even_int) {
        int order = static_cast<int>(std::floor(q));
        if (std::abs(q - rounded) < 1e-12) order = static_cast<int>(rounded) - 1;
        k = k ? std::min(*k, order) : order;
      }
    }
    if (n.a) scan_smoothness(*n.a, k);
    if (n.b) scan_smoothness(*n.b, k);
  }
};

/// Parse a component list like "[u^2/2, u^3/3]" into a flux.
inline Flux parse_flux(std::string_view spec, std::string name = "") {
  auto comps = Parser(spec).parse_component_list();
  if (name.empty()) name = std::string(spec);
  return Flux(std::move(comps), std::move(name));
}

struct CatalogEntry {
  std::string key;
  bool dim_parameter;      // key is a family parametrized by d
  int default_dim;
  std::string description;
  // Expected classification: alpha_sup = 1/d_F, 0 when the
  // nonlinearity index is infinite.
  bool d_F_finite;
  int d_F_of_dim(int d) const { return d_F_finite ? d : -1; }
};

inline const std::vector<CatalogEntry>& flux_catalog_entries() {
  static const std::vector<CatalogEntry> entries = {
      {"burgers1d", false, 1, "F = [u^2/2]; strictly convex 1-D flux", true},
      {"trig2d", false, 2, "F = [cos(u), sin(u)]; genuinely nonlinear in d=2", true},
      {"power-chain-d", true, 2, "a(u) = (u, u^2, ..., u^d); genuinely nonlinear", true},
      {"multid-burgers", true, 2, "F = [u^2, ..., u^2]; fails every nonlinearity test", false},
      {"flatbump-d", true, 2, "F_i = flatbump(u)*u^i; flat to all orders at u = 0", false},
  };
  return entries;
}

/// Build a catalog flux by key.  `dim` is honored only by the
/// d-parametrized families.
inline Flux catalog_flux(const std::string& key, int dim = 2) {
  auto make = [](std::string spec, std::string name) {
    return parse_flux(spec, std::move(name));
  };
  if (key == "burgers1d") return make("[u^2/2]", key);
  if (key == "trig2d") return make("[cos(u), sin(u)]", key);
  if (key == "power-chain-d") {
    if (dim < 1) throw std::invalid_argument("power-chain-d requires dim >= 1");
    std::ostringstream os;
    os << '[';
    for (int i = 1; i <= dim; ++i) {
      if (i > 1) os << ", ";
      os << "u^" << (i + 1) << "/" << (i + 1);
    }
    os << ']';
    return make(os.str(), key);
  }
  if (key == "multid-burgers") {
    if (dim < 1) throw std::invalid_argument("multid-burgers requires dim >= 1");
    std::ostringstream os;
    os << '[';
    for (int i = 0; i < dim; ++i) {
      if (i) os << ", ";
      os << "u^2";
    }
    os << ']';
    return make(os.str(), key);
  }
  if (key == "flatbump-d") {
    if (dim < 1) throw std::invalid_argument("flatbump-d requires dim >= 1");
    std::ostringstream os;
    os << '[';
    for (int i = 1; i <= dim; ++i) {
      if (i > 1) os << ", ";
      os << "flatbump(u)*u^" << i;
    }
    os << ']';
    return make(os.str(), key);
  }
  throw std::invalid_argument("unknown catalog flux '" + key + "'");
}

}  // namespace conslaw
