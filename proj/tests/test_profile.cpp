#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "conslaw/profile.hpp"
#include "support/riemann_oracle.hpp"

using namespace conslaw;

namespace {

ProfileData sin_profile() { return profile_from_expr(parse_expr("sin(2*pi*u)"), "sin"); }

std::vector<double> riemann_cells(int n, double ul, double ur) {
  // ul on [0, 1/2), ur on [1/2, 1)
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) v[static_cast<std::size_t>(j)] = ((j + 0.5) / n < 0.5) ? ul : ur;
  return v;
}

}  // namespace

TEST_CASE("psi_eps reduced flux") {
  SECTION("limit coefficient b for a = (u, u^2), gamma = q = 2") {
    Flux f = catalog_flux("power-chain-d", 2);
    double b = limit_profile_coefficient(f, 0.0, {0.0, 1.0}, 2.0, 2);
    CHECK(b == Catch::Approx(1.0 / 3.0));  // a''(0).v / 3!
  }
  SECTION("linear flux gives psi identically zero") {
    Flux f = parse_flux("[2*u, u - 3]");
    auto psi = psi_eps(f, 0.2, {1.0, 1.0}, 2.0, 0.125);
    for (double u : {-0.9, 0.0, 0.4, 1.0}) {
      CHECK(psi.psi(u) == Catch::Approx(0.0).margin(1e-9));
      CHECK(psi.dpsi(u) == Catch::Approx(0.0).margin(1e-9));
    }
  }
  SECTION("1-D Burgers with gamma = 1 reduces exactly to U^2/2") {
    Flux f = catalog_flux("burgers1d");
    for (double eps : {1.0, 0.25, 1.0 / 64}) {
      auto psi = psi_eps(f, 0.0, {1.0}, 1.0, eps);
      for (double u : {-1.0, -0.3, 0.5, 1.0}) {
        CHECK(psi.psi(u) == Catch::Approx(0.5 * u * u).margin(1e-10));
      }
    }
  }
  SECTION("psi_eps converges pointwise to the limit flux") {
    Flux f = catalog_flux("trig2d");
    // ubar = 0, v = (0,1): a'(0).v = 0, a''(0).v = -1, q = 2
    double b = limit_profile_coefficient(f, 0.0, {0.0, 1.0}, 2.0, 2);
    CHECK(b == Catch::Approx(-1.0 / 6.0));
    for (double u : {-0.8, 0.3, 0.9}) {
      double prev = 1e9;
      for (double eps : {0.5, 0.25, 0.125, 0.0625}) {
        auto psi = psi_eps(f, 0.0, {0.0, 1.0}, 2.0, eps);
        double err = std::abs(psi.psi(u) - b * u * u * u);
        CHECK(err < prev + 1e-12);
        prev = err;
      }
      CHECK(prev < 1e-3);
    }
  }
}

TEST_CASE("shock time") {
  SECTION("Burgers with sin data: T* = 1/(2 pi)") {
    auto psi = limit_profile_flux(0.5, 1);  // psi = U^2/2
    double t = shock_time(psi, sin_profile());
    CHECK(t == Catch::Approx(1.0 / (2.0 * M_PI)).epsilon(1e-6));
  }
  SECTION("constant data never shocks") {
    auto psi = limit_profile_flux(0.5, 1);
    auto u0 = profile_from_expr(parse_expr("0.3 + 0*u"));
    CHECK(std::isinf(shock_time(psi, u0)));
  }
  SECTION("linear psi never shocks") {
    auto psi = limit_profile_flux(1.0, 0);  // psi = U, transport
    CHECK(std::isinf(shock_time(psi, sin_profile())));
  }
}

TEST_CASE("characteristics solver") {
  auto u0 = sin_profile();
  SECTION("pure transport shifts the profile") {
    ProfileFlux psi;
    psi.psi = [](double u) { return 2.0 * u; };
    psi.dpsi = [](double) { return 2.0; };
    psi.ddpsi = [](double) { return 0.0; };
    psi.provenance = "transport";
    auto f = solve_characteristics(psi, u0, 0.3, 256);
    for (int j = 0; j < f.n; ++j)
      CHECK(f.values[static_cast<std::size_t>(j)] ==
            Catch::Approx(std::sin(2 * M_PI * (f.theta(j) - 0.6))).margin(1e-10));
  }
  SECTION("t = 0 returns the sampled data") {
    auto psi = limit_profile_flux(0.5, 1);
    auto f = solve_characteristics(psi, u0, 0.0, 128);
    for (int j = 0; j < f.n; ++j)
      CHECK(f.values[static_cast<std::size_t>(j)] ==
            Catch::Approx(std::sin(2 * M_PI * f.theta(j))).margin(1e-14));
  }
  SECTION("rejects times at or past the safety bound") {
    auto psi = limit_profile_flux(0.5, 1);
    CHECK_THROWS_AS(solve_characteristics(psi, u0, 0.96 / (2 * M_PI), 64),
                    characteristics_error);
  }
  SECTION("agrees with the finite-volume solution before the shock") {
    auto psi = limit_profile_flux(0.5, 1);
    double t = 0.1 / (2 * M_PI);
    auto ch = solve_characteristics(psi, u0, t, 4096);
    auto fv = solve_entropy_fv(psi, sample_cells(u0, 4096), {t});
    CHECK(l1_distance(ch, fv.front()) < 5e-4);
  }
}

TEST_CASE("finite-volume entropy solver") {
  SECTION("Riemann shock moves at the Rankine-Hugoniot speed") {
    auto psi = limit_profile_flux(0.5, 1);
    const int n = 512;
    double t = 0.2;
    auto sol = solve_entropy_fv(psi, riemann_cells(n, 1.0, 0.0), {t}).front();
    // front: mid-level crossing of the jump that started at theta = 1/2
    double front = -1;
    for (int j = 0; j < n - 1; ++j) {
      double th = sol.theta(j);
      if (th < 0.3 || th > 0.9) continue;
      if (sol.values[static_cast<std::size_t>(j)] >= 0.5 &&
          sol.values[static_cast<std::size_t>(j) + 1] < 0.5) {
        front = th;
        break;
      }
    }
    REQUIRE(front > 0);
    CHECK(front == Catch::Approx(0.5 + 0.5 * t).margin(1.0 / n + 1e-12));
  }
  SECTION("Riemann rarefaction matches the fan") {
    auto psi = limit_profile_flux(0.5, 1);
    const int n = 512;
    double t = 0.15;
    // data -1 on [0,1/2), +1 on [1/2,1): rarefaction fan at theta = 1/2
    std::vector<double> init = riemann_cells(n, -1.0, 1.0);
    auto sol = solve_entropy_fv(psi, init, {t}).front();
    double err = 0.0;
    for (int j = 0; j < n; ++j) {
      double th = sol.theta(j);
      if (th < 0.25 || th > 0.75) continue;  // stay clear of the other (shock) front
      double xi = (th - 0.5) / t;
      double want = xi <= -1.0 ? -1.0 : (xi >= 1.0 ? 1.0 : xi);
      err += std::abs(sol.values[static_cast<std::size_t>(j)] - want) / n;
    }
    CHECK(err < 2.0 / n * 4);  // first-order: O(dtheta) in L1
  }
  SECTION("nonconvex flux matches the envelope construction") {
    ProfileFlux psi;
    psi.psi = [](double u) { return u * u * u; };
    psi.dpsi = [](double u) { return 3.0 * u * u; };
    psi.ddpsi = [](double u) { return 6.0 * u; };
    psi.provenance = "cubic";
    const int n = 1024;
    // waves span |xi| <= 3: keep them clear of the periodic companion
    // jump at theta = 0 so the line-domain construction applies
    double t = 0.05;
    auto sol = solve_entropy_fv(psi, riemann_cells(n, 1.0, -1.0), {t}).front();
    oracle::RiemannSolution exact([](double u) { return u * u * u; }, 1.0, -1.0);
    double err = 0.0;
    for (int j = 0; j < n; ++j) {
      double th = sol.theta(j);
      if (std::abs(th - 0.5) > 0.24) continue;
      err += std::abs(sol.values[static_cast<std::size_t>(j)] - exact((th - 0.5) / t)) / n;
    }
    CHECK(err < 2.0 / n * 2.0);  // L1 within two cells' worth of the jump
  }
  SECTION("max principle and conservation") {
    auto psi = limit_profile_flux(-1.0 / 6.0, 2);  // nonconvex cubic limit flux
    auto init = sample_cells(sin_profile(), 256);
    double m0 = pairwise_mean(init);
    auto traj = solve_entropy_fv(psi, init, {0.5, 1.0, 2.0, 4.0});
    for (const auto& f : traj) {
      double lo = *std::min_element(f.values.begin(), f.values.end());
      double hi = *std::max_element(f.values.begin(), f.values.end());
      CHECK(lo >= -1.0 - 1e-12);
      CHECK(hi <= 1.0 + 1e-12);
      CHECK(mean_value(f) == Catch::Approx(m0).margin(1e-10));
    }
  }
  SECTION("pre-shock convergence to characteristics at first order") {
    auto psi = limit_profile_flux(0.5, 1);
    auto u0 = sin_profile();
    double t = 0.9 * 0.9 / (2 * M_PI);
    std::vector<double> errs;
    for (int n : {256, 512, 1024}) {
      auto ch = solve_characteristics(psi, u0, t, n);
      auto fv = solve_entropy_fv(psi, sample_cells(u0, n), {t}).front();
      errs.push_back(l1_distance(ch, fv));
    }
    double rate1 = std::log2(errs[0] / errs[1]);
    double rate2 = std::log2(errs[1] / errs[2]);
    CHECK(rate1 > 0.8);
    CHECK(rate2 > 0.8);
  }
  SECTION("long-time decay to the mean after shocks") {
    auto psi = limit_profile_flux(0.5, 1);
    auto init = sample_cells(sin_profile(), 512);
    auto traj = solve_entropy_fv(psi, init, {1.0, 2.0, 4.0, 8.0});
    double prev = 1e30;
    for (const auto& f : traj) {
      double dist = 0.0;
      for (double v : f.values) dist += std::abs(v - 0.0) / f.n;
      CHECK(dist < prev);
      prev = dist;
    }
  }
}

TEST_CASE("uniform life span of the reduced fluxes") {
  // gamma < q: psi_eps = O(eps^r); T*(eps) >= 1/(m d0) uniformly
  Flux f = catalog_flux("power-chain-d", 2);
  auto u0 = sin_profile();
  double d0 = 2.0 * M_PI;
  double m = 0.0;
  double tmin = std::numeric_limits<double>::infinity();
  for (double eps : {1.0, 0.5, 0.25, 0.125, 0.0625}) {
    auto psi = psi_eps(f, 0.0, {0.0, 1.0}, 1.5, eps);
    for (int j = 0; j <= 64; ++j) m = std::max(m, std::abs(psi.ddpsi(-1.0 + 2.0 * j / 64)));
    tmin = std::min(tmin, shock_time(psi, u0));
  }
  CHECK(tmin >= 1.0 / (m * d0) - 1e-12);
  CHECK(tmin > 0.1);  // bounded away from zero uniformly in eps
}

TEST_CASE("mean value") {
  ProfileField f;
  f.n = 1024;
  f.values.resize(1024);
  SECTION("sin averages to zero") {
    for (int j = 0; j < f.n; ++j) f.values[static_cast<std::size_t>(j)] = std::sin(2 * M_PI * f.theta(j));
    CHECK(std::abs(mean_value(f)) < 1e-12);
  }
  SECTION("constant") {
    for (auto& v : f.values) v = 0.77;
    CHECK(mean_value(f) == Catch::Approx(0.77));
  }
  SECTION("0.3 + 0.5 sin^2") {
    for (int j = 0; j < f.n; ++j) {
      double s = std::sin(2 * M_PI * f.theta(j));
      f.values[static_cast<std::size_t>(j)] = 0.3 + 0.5 * s * s;
    }
    CHECK(mean_value(f) == Catch::Approx(0.55).margin(1e-6));
  }
}

TEST_CASE("fv shock detection agrees with the formula") {
  auto psi = limit_profile_flux(0.5, 1);
  double t_formula = 1.0 / (2 * M_PI);
  double t_fv = shock_time_fv(psi, sin_profile(), 3.0 * t_formula);
  CHECK(t_fv == Catch::Approx(t_formula).epsilon(0.05));
}
