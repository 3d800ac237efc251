#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "attractor/forcing.hpp"

using namespace attractor;

namespace {

constexpr double kPi = std::numbers::pi;
const double kSqrt2 = std::sqrt(2.0);

Symbol two_tone(double a) {
  return Symbol::quasiperiodic({{{a, 0.0}, 1.0, 0.0}, {{a, 0.0}, kSqrt2, 0.0}});
}

}  // namespace

TEST_CASE("evaluate of built-in symbols") {
  SECTION("zero symbol is zero at every t") {
    const Symbol z = Symbol::zero();
    for (double t : {-3.0, 0.0, 17.5}) {
      const Vec g = z.evaluate(t, 4);
      REQUIRE(g == Vec(4, 0.0));
    }
  }
  SECTION("periodic amplitude on mode 1 at t = pi/2") {
    const Symbol s = Symbol::periodic({0.7, 0.0}, 1.0);
    const Vec g = s.evaluate(kPi / 2.0, 2);
    REQUIRE(g[0] == Catch::Approx(0.7).margin(1e-14));
    REQUIRE(g[1] == 0.0);
  }
  SECTION("quasiperiodic sin t + sin(sqrt2 t) vanishes at t = 0") {
    const Vec g = two_tone(1.0).evaluate(0.0, 1);
    REQUIRE(g[0] == Catch::Approx(0.0).margin(1e-14));
  }
}

TEST_CASE("analytic time derivative matches a central difference") {
  const double eps = 1e-5;
  const std::vector<Symbol> symbols = {
      Symbol::constant({1.0}), Symbol::periodic({2.0}, 1.3, 0.4), two_tone(0.8),
      Symbol::ramped_switch({1.0}).translated(0.7)};
  for (const Symbol& s : symbols) {
    for (double t : {0.3, 2.0, 11.7}) {
      const Vec d = s.evaluate_dt(t, 1);
      const Vec hi = s.evaluate(t + eps, 1);
      const Vec lo = s.evaluate(t - eps, 1);
      REQUIRE(d[0] == Catch::Approx((hi[0] - lo[0]) / (2.0 * eps)).margin(1e-6));
    }
  }
}

TEST_CASE("translation action") {
  const Symbol s = Symbol::periodic({1.0}, 1.0, 0.2);

  SECTION("translate by zero is the identity") {
    REQUIRE(s.translated(0.0).shift() == s.shift());
    REQUIRE(s.translated(0.0).evaluate(1.3, 1) == s.evaluate(1.3, 1));
  }
  SECTION("shifts compose additively and exactly") {
    REQUIRE(s.translated(1.0).translated(2.0).shift() == s.shift() + 3.0);
  }
  SECTION("2pi translate of a 2pi-periodic symbol") {
    const Symbol t = s.translated(2.0 * kPi);
    for (double x : {0.0, 0.9, 4.4})
      REQUIRE(t.evaluate(x, 1)[0] == Catch::Approx(s.evaluate(x, 1)[0]).margin(1e-12));
  }
  SECTION("translation identity holds exactly on random (s, t) pairs") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> unif(-5.0, 5.0);
    for (const Symbol& base : {Symbol::periodic({1.0}, 0.9), two_tone(1.1),
                               Symbol::ramped_switch({0.5})}) {
      for (int i = 0; i < 50; ++i) {
        const double sh = unif(rng), t = unif(rng);
        REQUIRE(base.translated(sh).evaluate(t, 1) == base.evaluate(t + sh, 1));
      }
    }
  }
}

TEST_CASE("l2b norm") {
  SECTION("constant symbol of L2 norm c gives c^2") {
    const Symbol s = Symbol::constant({3.0, 4.0});
    REQUIRE(l2b_norm(s, 0.0, 5.0, 1e-3) == Catch::Approx(25.0).epsilon(1e-6));
  }
  SECTION("zero symbol gives 0") {
    REQUIRE(l2b_norm(Symbol::zero(), 0.0, 5.0, 1e-3) == 0.0);
  }
  SECTION("sin forcing attains the closed-form unit-window sup") {
    // sup_t int_t^{t+1} sin^2 = (1 + sin 1)/2, attained where cos(2t+1) = -1.
    const Symbol s = Symbol::periodic({1.0}, 1.0);
    const double expect = 0.5 * (1.0 + std::sin(1.0));
    REQUIRE(l2b_norm(s, 0.0, 4.0 * kPi, 1e-3) == Catch::Approx(expect).margin(1e-4));
  }
  SECTION("translation invariance up to scan resolution") {
    const Symbol s = two_tone(1.0);
    REQUIRE(l2b_norm(s.translated(2.7), 0.0, 20.0, 1e-3) ==
            Catch::Approx(l2b_norm(s, 2.7, 22.7, 1e-3)).margin(1e-3));
  }
  SECTION("argument validation") {
    REQUIRE_THROWS_AS(l2b_norm(Symbol::zero(), 0.0, 5.0, -1.0), Error);
    REQUIRE_THROWS_AS(l2b_norm(Symbol::zero(), 0.0, 0.5, 1e-3), Error);
  }
}

TEST_CASE("linf norm") {
  REQUIRE(linf_norm(Symbol::zero(), 0.0, 5.0, 1e-3) == 0.0);
  REQUIRE(linf_norm(Symbol::constant({3.0, 4.0}), 0.0, 5.0, 1e-3) ==
          Catch::Approx(5.0).margin(1e-12));
  const Symbol s = Symbol::periodic({0.0, 1.7}, 1.0);
  REQUIRE(linf_norm(s, 0.0, 2.0 * kPi, 1e-4) == Catch::Approx(1.7).margin(1e-6));
}

TEST_CASE("hull sampling") {
  const Symbol base = Symbol::periodic({1.0}, 1.0);

  SECTION("shifts {0} give the base symbol alone") {
    const HullSample h = hull_sample(base, {0.0});
    REQUIRE(h.members.size() == 1);
    REQUIRE(h.members[0].shift() == base.shift());
  }
  SECTION("shift 0 is prepended when missing") {
    const HullSample h = hull_sample(base, {1.5});
    REQUIRE(h.shifts == Vec{0.0, 1.5});
  }
  SECTION("a full-period shift reproduces the base pointwise") {
    const HullSample h = hull_sample(base, {0.0, 2.0 * kPi});
    for (double t : {0.0, 1.1, 3.7})
      REQUIRE(h.members[1].evaluate(t, 1)[0] ==
              Catch::Approx(h.members[0].evaluate(t, 1)[0]).margin(1e-12));
  }
  SECTION("quasiperiodic shifts are pairwise distinct") {
    const HullSample h = hull_sample(two_tone(1.0), {0.0, 1.0, 2.0});
    for (std::size_t i = 0; i < h.members.size(); ++i)
      for (std::size_t j = i + 1; j < h.members.size(); ++j) {
        double maxdiff = 0.0;
        for (double t = 0.0; t < 10.0; t += 0.1)
          maxdiff = std::max(maxdiff, std::abs(h.members[i].evaluate(t, 1)[0] -
                                               h.members[j].evaluate(t, 1)[0]));
        REQUIRE(maxdiff > 1e-3);
      }
  }
  SECTION("hull members do not exceed the base sup norm") {
    const Symbol g0 = two_tone(1.0);
    const double base_sup = linf_norm(g0, 0.0, 200.0, 1e-2);
    for (const Symbol& m : hull_sample(g0, {0.0, 1.0, 2.5, 4.0}).members)
      REQUIRE(linf_norm(m, 0.0, 50.0, 1e-2) <= base_sup + 1e-2);
  }
}
