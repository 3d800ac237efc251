#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "attractor/spectral.hpp"

using namespace attractor;

namespace {

constexpr double kPi = std::numbers::pi;

// Evaluate the modal expansion at an arbitrary x (independent of the basis
// tabulation), 1D only.
double eval_1d(const Vec& modal, const Basis& b, double x) {
  double s = 0.0;
  for (int m = 0; m < b.n_modes; ++m)
    s += modal[m] * std::sqrt(2.0 / b.lengths[0]) *
         std::sin(b.mode_index[m][0] * kPi * x / b.lengths[0]);
  return s;
}

// Composite-Simpson projection of the expansion onto mode m: an independent
// quadrature oracle for the collocation transform.
double simpson_projection(const Vec& modal, const Basis& b, int m, int intervals) {
  const double L = b.lengths[0];
  const double h = L / intervals;
  auto integrand = [&](double x) {
    return eval_1d(modal, b, x) * std::sqrt(2.0 / L) *
           std::sin(b.mode_index[m][0] * kPi * x / L);
  };
  double s = integrand(0.0) + integrand(L);
  for (int i = 1; i < intervals; ++i) s += (i % 2 ? 4.0 : 2.0) * integrand(i * h);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("eigenvalues on (0,pi) are k^2") {
  const Basis b = build_basis(1, 4, {kPi});
  REQUIRE(b.n_modes == 4);
  const Vec expect = {1.0, 4.0, 9.0, 16.0};
  for (int k = 0; k < 4; ++k) REQUIRE(b.eigenvalues[k] == Catch::Approx(expect[k]).margin(1e-12));
  REQUIRE(b.lambda1() == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("eigenvalue on (0,1) is pi^2") {
  const Basis b = build_basis(1, 1, {1.0});
  REQUIRE(b.eigenvalues[0] == Catch::Approx(kPi * kPi).epsilon(1e-14));
}

TEST_CASE("2D separable spectrum on (0,pi)^2 with lexicographic ties") {
  const Basis b = build_basis(2, 2, {kPi, kPi});
  REQUIRE(b.n_modes == 4);
  const Vec expect = {2.0, 5.0, 5.0, 8.0};
  for (int k = 0; k < 4; ++k) REQUIRE(b.eigenvalues[k] == Catch::Approx(expect[k]).margin(1e-12));
  // The two lambda=5 modes are (1,2) then (2,1).
  REQUIRE(b.mode_index[1] == std::array<int, 2>{1, 2});
  REQUIRE(b.mode_index[2] == std::array<int, 2>{2, 1});
}

TEST_CASE("build_basis rejects invalid arguments") {
  REQUIRE_THROWS_AS(build_basis(3, 4, {1.0, 1.0, 1.0}), Error);
  REQUIRE_THROWS_AS(build_basis(1, 0, {1.0}), Error);
  REQUIRE_THROWS_AS(build_basis(1, 4, {-1.0}), Error);
  REQUIRE_THROWS_AS(build_basis(2, 4, {1.0}), Error);
}

TEST_CASE("quadrature reproduces orthonormality to 1e-12") {
  for (const Basis& b : {build_basis(1, 8, {kPi}), build_basis(2, 3, {kPi, 2.0})}) {
    for (int m = 0; m < b.n_modes; ++m)
      for (int n = 0; n <= m; ++n) {
        double s = 0.0;
        for (int q = 0; q < b.n_quad; ++q)
          s += b.quad_weights[q] * b.mode_values(m)[q] * b.mode_values(n)[q];
        REQUIRE(s == Catch::Approx(m == n ? 1.0 : 0.0).margin(1e-12));
      }
  }
}

TEST_CASE("to_modal o to_physical is the identity") {
  const Basis b = build_basis(1, 8, {kPi});

  SECTION("zero coefficients") {
    const Vec zero(b.n_modes, 0.0);
    const Vec grid = to_physical(zero, b);
    for (double g : grid) REQUIRE(g == 0.0);
    const Vec back = to_modal(grid, b);
    for (double a : back) REQUIRE(a == 0.0);
  }

  SECTION("unit coefficient on mode 1") {
    Vec e1(b.n_modes, 0.0);
    e1[0] = 1.0;
    const Vec back = to_modal(to_physical(e1, b), b);
    REQUIRE(back[0] == Catch::Approx(1.0).margin(1e-12));
    for (int m = 1; m < b.n_modes; ++m) REQUIRE(std::abs(back[m]) < 1e-12);
  }

  SECTION("random coefficients, round trip and direct quadrature oracle") {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> normal(0.0, 1.0);
    Vec a(b.n_modes);
    for (double& x : a) x = normal(rng);
    const Vec back = to_modal(to_physical(a, b), b);
    for (int m = 0; m < b.n_modes; ++m) REQUIRE(back[m] == Catch::Approx(a[m]).margin(1e-12));
    // Independent Simpson projection of the same expansion.
    for (int m = 0; m < b.n_modes; ++m)
      REQUIRE(simpson_projection(a, b, m, 4096) == Catch::Approx(a[m]).margin(1e-9));
  }
}

TEST_CASE("transforms reject shape mismatches") {
  const Basis b = build_basis(1, 4, {kPi});
  REQUIRE_THROWS_AS(to_physical(Vec(3, 0.0), b), Error);
  REQUIRE_THROWS_AS(to_modal(Vec(b.n_quad + 1, 0.0), b), Error);
  REQUIRE_THROWS_AS(norms(Vec(3, 0.0), b), Error);
}

TEST_CASE("modal norms") {
  const Basis b = build_basis(1, 4, {kPi});

  SECTION("mode 1 has l2 = h1 = 1") {
    const Norms n = norms({1.0, 0.0, 0.0, 0.0}, b);
    REQUIRE(n.l2 == Catch::Approx(1.0).margin(1e-14));
    REQUIRE(n.h1 == Catch::Approx(1.0).margin(1e-14));
  }
  SECTION("mode 2 has h1^2 = 4") {
    const Norms n = norms({0.0, 1.0, 0.0, 0.0}, b);
    REQUIRE(n.h1 * n.h1 == Catch::Approx(4.0).margin(1e-12));
  }
  SECTION("Pythagoras") {
    const Basis b2 = build_basis(1, 2, {kPi});
    REQUIRE(norms({3.0, 4.0}, b2).l2 == Catch::Approx(5.0).margin(1e-12));
  }
}

TEST_CASE("modal h1 norm matches quadrature of the analytic gradient") {
  const Basis b = build_basis(1, 8, {kPi});
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec a(b.n_modes);
  for (double& x : a) x = normal(rng);

  // Trapezoid over a uniform grid including endpoints: discrete cosine
  // orthogonality makes the gradient quadrature exact to rounding.
  const int M = 8 * b.modes_per_dim;
  const double L = b.lengths[0];
  const double h = L / M;
  double h1sq = 0.0;
  for (int i = 0; i <= M; ++i) {
    const double x = i * h;
    double du = 0.0;
    for (int m = 0; m < b.n_modes; ++m) {
      const int k = b.mode_index[m][0];
      du += a[m] * std::sqrt(2.0 / L) * (k * kPi / L) * std::cos(k * kPi * x / L);
    }
    h1sq += (i == 0 || i == M ? 0.5 : 1.0) * h * du * du;
  }
  const Norms n = norms(a, b);
  REQUIRE(n.h1 * n.h1 == Catch::Approx(h1sq).epsilon(1e-10));
}

TEST_CASE("eigenvalue ordering is deterministic") {
  const Basis b1 = build_basis(2, 4, {kPi, kPi});
  const Basis b2 = build_basis(2, 4, {kPi, kPi});
  REQUIRE(b1.eigenvalues == b2.eigenvalues);
  REQUIRE(b1.mode_index == b2.mode_index);
  for (std::size_t i = 0; i + 1 < b1.eigenvalues.size(); ++i)
    REQUIRE(b1.eigenvalues[i] <= b1.eigenvalues[i + 1]);
}
