#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "conslaw/nonlinearity.hpp"

using namespace conslaw;

namespace {

// Analytic oracle for |{ |v| <= M : |tau + a v xi| <= delta }| when the
// velocity is affine a(v) = a0 + a1 v: interval of length 2 delta/|a1 xi|
// centered at the root, clipped to [-M, M].
double affine_measure_oracle(double a0, double a1, double M, double tau, double xi,
                             double delta) {
  double c0 = tau + a0 * xi, c1 = a1 * xi;
  if (std::abs(c1) < 1e-300) return (std::abs(c0) <= delta) ? 2.0 * M : 0.0;
  double lo = (-delta - c0) / c1, hi = (delta - c0) / c1;
  if (lo > hi) std::swap(lo, hi);
  return std::max(0.0, std::min(hi, M) - std::max(lo, -M));
}

}  // namespace

TEST_CASE("d_F_at on the paper examples") {
  SECTION("power chain gives d at every u") {
    for (int d : {1, 2, 3}) {
      Flux f = catalog_flux("power-chain-d", d);
      for (double u : {-0.9, -0.3, 0.0, 0.4, 1.0}) {
        auto r = d_F_at(f, u, 2 * d + 6);
        REQUIRE(r.has_value());
        CHECK(*r == d);
      }
    }
  }
  SECTION("multi-D Burgers is never nonlinear") {
    Flux f = catalog_flux("multid-burgers", 2);
    for (double u : {-1.0, 0.0, 0.7}) CHECK_FALSE(d_F_at(f, u, 10).has_value());
  }
  SECTION("trig flux has index 2") {
    Flux f = catalog_flux("trig2d");
    auto r = d_F_at(f, 0.3, 4);
    REQUIRE(r.has_value());
    CHECK(*r == 2);
  }
}

TEST_CASE("d_F_global reports") {
  SECTION("a = (u, u^2)") {
    auto rep = d_F_global(catalog_flux("power-chain-d", 2), 1.0);
    REQUIRE(rep.finite);
    CHECK(rep.d_F == 2);
    CHECK(rep.alpha_sup == Catch::Approx(0.5));
    CHECK(rep.alpha_num == 1);
    CHECK(rep.alpha_den == 2);
    // argmax consistency
    auto at = d_F_at(catalog_flux("power-chain-d", 2), rep.u_star, rep.kmax);
    REQUIRE(at.has_value());
    CHECK(*at == rep.d_F);
  }
  SECTION("low-degree polynomial F = (u^2, u) is degenerate") {
    auto rep = d_F_global(parse_flux("[u^2, u]"), 1.0);
    CHECK_FALSE(rep.finite);
    CHECK(rep.alpha_sup == 0.0);
  }
  SECTION("deg(F_i) = 1 + i is genuinely nonlinear") {
    for (int d : {2, 3}) {
      auto rep = d_F_global(catalog_flux("power-chain-d", d), 1.0);
      REQUIRE(rep.finite);
      CHECK(rep.d_F == d);
      CHECK(rep.alpha_sup == Catch::Approx(1.0 / d));
    }
  }
  SECTION("flat bump flux is degenerate at the origin") {
    auto rep = d_F_global(catalog_flux("flatbump-d", 2), 1.0);
    CHECK_FALSE(rep.finite);
  }
}

TEST_CASE("d_F index invariances") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> us(-0.9, 0.9);
  std::uniform_real_distribution<double> cs(0.2, 3.0);
  Flux base = catalog_flux("power-chain-d", 2);
  for (int rep = 0; rep < 10; ++rep) {
    double u = us(rng);
    double lambda = cs(rng) * (rng() % 2 ? 1.0 : -1.0);
    double lin = cs(rng);
    auto scaled = parse_flux("[" + std::to_string(lambda) + "*(u^2/2), " +
                             std::to_string(lambda) + "*(u^3/3)]");
    auto shifted = parse_flux("[u^2/2 + " + std::to_string(lin) + "*u, u^3/3 - " +
                              std::to_string(lin) + "*u + 0.7]");
    auto r0 = d_F_at(base, u, 10);
    auto r1 = d_F_at(scaled, u, 10);
    auto r2 = d_F_at(shifted, u, 10);
    REQUIRE(r0.has_value());
    CHECK(*r1 == *r0);
    CHECK(*r2 == *r0);
  }
}

TEST_CASE("degeneracy measure") {
  Flux burgers = catalog_flux("burgers1d");
  SECTION("1-D Burgers worst direction") {
    auto m = degeneracy_measure(burgers, 1.0, 0.0, {1.0}, 0.1, 20000);
    CHECK(m.measure == Catch::Approx(0.2).margin(1e-6));
    CHECK_FALSE(m.degenerate_direction);
  }
  SECTION("pure-time direction is empty") {
    auto m = degeneracy_measure(burgers, 1.0, 1.0, {0.0}, 0.5, 20000);
    CHECK(m.measure == 0.0);
  }
  SECTION("linear flux fully degenerate direction") {
    Flux lin = parse_flux("[u]");  // a == 1
    double s = std::sqrt(0.5);
    auto m = degeneracy_measure(lin, 1.0, -s, {s}, 0.01, 20000);
    CHECK(m.measure == Catch::Approx(2.0).margin(1e-9));
  }
  SECTION("matches the affine oracle across random directions") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> th(0.0, 2 * M_PI);
    for (int rep = 0; rep < 25; ++rep) {
      double t = th(rng);
      double tau = std::cos(t), xi = std::sin(t);
      for (double delta : {0.2, 0.05, 0.01}) {
        auto m = degeneracy_measure(burgers, 1.0, tau, {xi}, delta, 20000);
        double want = affine_measure_oracle(0.0, 1.0, 1.0, tau, xi, delta);
        CHECK(m.measure == Catch::Approx(want).margin(2.0 * 2.0 / 20000));
      }
    }
  }
  SECTION("rotation covariance in d = 2") {
    Flux f = catalog_flux("power-chain-d", 2);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> th(0.0, 2 * M_PI);
    for (int rep = 0; rep < 5; ++rep) {
      double ang = th(rng);
      double c = std::cos(ang), s = std::sin(ang);
      // rotated flux R F with R = [[c, -s], [s, c]]
      char buf[256];
      std::snprintf(buf, sizeof buf, "[%.17g*(u^2/2) - %.17g*(u^3/3), %.17g*(u^2/2) + %.17g*(u^3/3)]",
                    c, s, s, c);
      Flux rf = parse_flux(buf);
      double t = th(rng);
      double tau = std::cos(t), x1 = std::sin(t) * std::cos(ang + 0.37),
             x2 = std::sin(t) * std::sin(ang + 0.37);
      auto m1 = degeneracy_measure(f, 1.0, tau, {x1, x2}, 0.05, 50000);
      // direction (tau, R xi) applied to R F matches (tau, xi) on F
      auto m2 = degeneracy_measure(rf, 1.0, tau, {c * x1 - s * x2, s * x1 + c * x2}, 0.05, 50000);
      CHECK(m1.measure == Catch::Approx(m2.measure).margin(4.0 * 2.0 / 50000));
    }
  }
}

TEST_CASE("worst direction") {
  SECTION("a = (u, u^2) at 0: xi along e2, tau = 0") {
    // independent 2x2 null-space solve: xi must satisfy a'(0) . xi = 0
    // with a'(0) = (1, 0), so xi = (0, 1) up to sign and scale
    auto dir = worst_direction(catalog_flux("power-chain-d", 2), 0.0, 2);
    CHECK(std::abs(dir.xi[0]) < 1e-12);
    CHECK(std::abs(std::abs(dir.xi[1]) - 1.0) < 1e-12);
    CHECK(std::abs(dir.tau) < 1e-12);
  }
  SECTION("d = 1 convex flux") {
    auto dir = worst_direction(catalog_flux("burgers1d"), 0.5, 1);
    // xi = +-1, tau = -a(0.5) xi = -+0.5, then normalized
    CHECK(std::abs(dir.xi[0]) == Catch::Approx(1.0 / std::sqrt(1.25)));
    CHECK(dir.tau * dir.xi[0] < 0.0);
  }
  SECTION("trig flux at 0: symbol vanishes to order exactly 2") {
    Flux f = catalog_flux("trig2d");
    auto dir = worst_direction(f, 0.0, 2);
    auto phi = [&](double v) {
      auto a = f.velocity(v);
      return dir.tau + a[0] * dir.xi[0] + a[1] * dir.xi[1];
    };
    CHECK(std::abs(phi(0.0)) < 1e-12);
    double h = 1e-4;
    double d1 = (phi(h) - phi(-h)) / (2 * h);
    double d2 = (phi(h) - 2 * phi(0.0) + phi(-h)) / (h * h);
    CHECK(std::abs(d1) < 1e-8);
    CHECK(std::abs(d2) > 0.1);
  }
}

TEST_CASE("empirical alpha fit", "[slow]") {
  AlphaFitConfig cfg;
  cfg.n_samples = 50000;
  cfg.threads = 2;
  SECTION("1-D Burgers slope 1") {
    Flux f = catalog_flux("burgers1d");
    cfg.angles_1d = 360;
    auto fit = fit_alpha_empirical(f, 1.0, default_alpha_directions(f, 1.0, cfg), cfg);
    REQUIRE_FALSE(fit.fit.empty);
    CHECK(fit.fit.slope == Catch::Approx(1.0).margin(0.05));
  }
  SECTION("linear flux: flat scaling from the degenerate direction") {
    Flux f = parse_flux("[u, 2*u]");
    cfg.fibonacci_2d = 500;
    auto fit = fit_alpha_empirical(f, 1.0, default_alpha_directions(f, 1.0, cfg), cfg);
    REQUIRE_FALSE(fit.fit.empty);
    CHECK(std::abs(fit.fit.slope) < 0.02);
    for (double m : fit.worst_measure) CHECK(m == Catch::Approx(2.0).margin(1e-6));
  }
}

TEST_CASE("measure bound constants and checks") {
  CHECK(measure_bound_constant(1) == Catch::Approx(2.0));
  CHECK(measure_bound_constant(2) == Catch::Approx(4.0 * std::sqrt(2.0)));
  CHECK(measure_bound_constant(3) == Catch::Approx(8.0));  // 4 (4 sqrt2 / 2)^(2/3)

  SECTION("identity map") {
    auto r = measure_bound_check([](double v) { return v; }, -1.0, 1.0, 1, 0.3);
    CHECK(r.status == MeasureBoundResult::Status::Holds);
    CHECK(r.measured == Catch::Approx(0.6).margin(1e-6));
    CHECK(r.bound == Catch::Approx(0.6));
  }
  SECTION("phi = v^2 with k = 2") {
    auto r = measure_bound_check([](double v) { return v * v; }, -1.0, 1.0, 2, 0.01);
    CHECK(r.status == MeasureBoundResult::Status::Holds);
    CHECK(r.measured == Catch::Approx(0.2).margin(1e-6));
    CHECK(r.bound == Catch::Approx(4.0 * std::sqrt(2.0) * 0.1));
  }
  SECTION("phi = v^3 with k = 3") {
    auto r = measure_bound_check([](double v) { return v * v * v; }, -1.0, 1.0, 3, 1e-3);
    CHECK(r.status == MeasureBoundResult::Status::Holds);
    CHECK(r.measured == Catch::Approx(0.2).margin(1e-6));
    CHECK(r.bound == Catch::Approx(8.0 * 0.1));
  }
  SECTION("hypothesis failure is reported, not false") {
    auto r = measure_bound_check([](double v) { return 0.1 * v; }, -1.0, 1.0, 1, 0.05);
    CHECK(r.status == MeasureBoundResult::Status::HypothesisFailed);
  }
}

TEST_CASE("definition classifiers") {
  SECTION("multi-D Burgers: smooth false, strict false") {
    auto c = check_definitions(catalog_flux("multid-burgers", 2), 1.0);
    REQUIRE(c.decidable);
    CHECK(c.smooth_nonlinear == Tri::False_);
    CHECK(c.general_nonlinear == Tri::False_);
    CHECK(c.strict_nonlinear == Tri::False_);  // xi = (1, -1) kills F'' = (2, 2)
    CHECK(c.implications_ok);
  }
  SECTION("trig flux: all three true") {
    auto c = check_definitions(catalog_flux("trig2d"), 1.0);
    REQUIRE(c.decidable);
    CHECK(c.smooth_nonlinear == Tri::True_);
    CHECK(c.general_nonlinear == Tri::True_);
    CHECK(c.strict_nonlinear == Tri::True_);
    CHECK(c.implications_ok);
  }
  SECTION("F = (u^2/2, u^3/6)") {
    auto c = check_definitions(parse_flux("[u^2/2, u^3/6]"), 1.0);
    REQUIRE(c.decidable);
    CHECK(c.smooth_nonlinear == Tri::True_);
    CHECK(c.strict_nonlinear == Tri::True_);  // F'' = (1, u) independent
    CHECK(c.implications_ok);
  }
  SECTION("flat bump flux is undecided with evidence") {
    auto c = check_definitions(catalog_flux("flatbump-d", 2), 1.0);
    CHECK_FALSE(c.decidable);
    CHECK(c.general_nonlinear == Tri::Undecided);
    CHECK(c.smooth_nonlinear == Tri::False_);  // index stays decided numerically
    CHECK_FALSE(c.evidence.empty());
  }
}

TEST_CASE("trig polynomial extraction sanity") {
  // (sin u)^2 + (cos u)^2 == 1
  TrigPoly p = trigpoly_from(parse_expr("sin(u)^2 + cos(u)^2"));
  double c;
  REQUIRE(p.is_constant(&c));
  CHECK(c == Catch::Approx(1.0));

  // derivative of u^2 cos(3u)
  TrigPoly q = trigpoly_from(parse_expr("u^2*cos(3*u)")).derivative();
  // = 2u cos(3u) - 3u^2 sin(3u)
  TrigPoly want = trigpoly_from(parse_expr("2*u*cos(3*u) - 3*u^2*sin(3*u)"));
  TrigPoly diff = q - want;
  diff.prune(1e-12);
  CHECK(diff.terms.empty());
}
