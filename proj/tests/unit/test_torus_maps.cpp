#include <cmath>

#include "doctest.h"
#include "torus_lab/errors.hpp"
#include "torus_lab/torus_map.hpp"

using namespace torus_lab;

namespace {

const double kAmp = 1.0 / (2.0 * kPi);

TorusMap perturbed_a() { return TorusMap({2, 1, 1, 1}, {{{1, 0}, {kAmp, 0.0}, 0.0}}, 0.05); }
TorusMap perturbed_b() { return TorusMap({3, 5, 1, 2}, {{{0, 1}, {0.0, kAmp}, 0.0}, {{1, 1}, {0.01, 0.02}, 0.3}}, 0.05); }

}  // namespace

TEST_SUITE("torus_maps") {
  TEST_CASE("wrapping and displacement") {
    CHECK(wrap_unit(-0.25) == doctest::Approx(0.75));
    CHECK(wrap_unit(3.5) == doctest::Approx(0.5));
    CHECK(wrap_unit(-1e-18) < 1.0);
    const Vec2 d = displacement({0.95, 0.1}, {0.05, 0.9});
    CHECK(d.x == doctest::Approx(0.1));
    CHECK(d.y == doctest::Approx(-0.2));
    CHECK(torus_distance({0.0, 0.0}, {0.5, 0.5}) == doctest::Approx(std::sqrt(0.5)));
  }

  TEST_CASE("rejects non-hyperbolic, non-unimodular and too large perturbations") {
    CHECK_THROWS_AS(TorusMap({2, 0, 0, 1}), InvalidMap);
    CHECK_THROWS_AS(TorusMap({1, 1, 0, 1}), InvalidMap);
    CHECK_THROWS_AS(TorusMap({2, 1, 1, 1}, {{{1, 0}, {1.0, 0.0}, 0.0}}, 1.0), InvalidMap);
    CHECK_THROWS_AS(TorusMap({2, 1, 1, 1}, {}, -0.1), InvalidMap);
    CHECK_NOTHROW(perturbed_a());
  }

  TEST_CASE("linear map acts on the lift by the matrix") {
    const TorusMap a({2, 1, 1, 1});
    const TorusPoint p = a.apply({0.3, 0.9});
    CHECK(p.x == doctest::Approx(wrap_unit(1.5)));
    CHECK(p.y == doctest::Approx(wrap_unit(1.2)));
  }

  TEST_CASE("inverse undoes apply for perturbed maps") {
    for (const TorusMap& f : {perturbed_a(), perturbed_b()}) {
      for (int k = 0; k < 20; ++k) {
        const TorusPoint p(0.37 * k + 0.01, 0.61 * k + 0.02);
        CHECK(torus_distance(f.inverse(f.apply(p)), p) < 1e-10);
        const Vec2 lifted = f.lift(p.vec());
        const Vec2 back = f.lift_inverse(lifted);
        CHECK(norm(back - p.vec()) < 1e-10);
      }
    }
  }

  TEST_CASE("differential matches central differences") {
    const TorusMap f = perturbed_b();
    const double h = 1e-6;
    for (int k = 0; k < 10; ++k) {
      const Vec2 p{0.13 * k, 0.29 * k + 0.05};
      const Mat2 d = f.differential(p);
      const Vec2 cx = (f.lift(p + Vec2{h, 0}) - f.lift(p - Vec2{h, 0})) / (2 * h);
      const Vec2 cy = (f.lift(p + Vec2{0, h}) - f.lift(p - Vec2{0, h})) / (2 * h);
      CHECK(d.a == doctest::Approx(cx.x).epsilon(1e-7));
      CHECK(d.c == doctest::Approx(cx.y).epsilon(1e-7));
      CHECK(d.b == doctest::Approx(cy.x).epsilon(1e-7));
      CHECK(d.d == doctest::Approx(cy.y).epsilon(1e-7));
    }
  }

  TEST_CASE("second differential matches differences of the differential") {
    const TorusMap f = perturbed_b();
    const double h = 1e-6;
    const Vec2 p{0.21, 0.77};
    const Vec2 v{0.6, -0.8};
    const Vec2 w{0.3, 0.4};
    const Vec2 exact = f.second_differential(p, v, w);
    const Vec2 fd = (f.differential(p + h * w) * v - f.differential(p - h * w) * v) / (2 * h);
    CHECK(exact.x == doctest::Approx(fd.x).epsilon(1e-6));
    CHECK(exact.y == doctest::Approx(fd.y).epsilon(1e-6));
    const Vec2 swapped = f.second_differential(p, w, v);
    CHECK(swapped.x == doctest::Approx(exact.x));
    CHECK(swapped.y == doctest::Approx(exact.y));
  }

  TEST_CASE("lift_difference is accurate for tiny offsets") {
    const TorusMap f = perturbed_a();
    const Vec2 p{0.4, 0.1};
    const Vec2 delta{1e-3, -2e-3};
    const Vec2 direct = f.lift(p + delta) - f.lift(p);
    const Vec2 diff = f.lift_difference(p, delta);
    CHECK(diff.x == doctest::Approx(direct.x).epsilon(1e-10));
    CHECK(diff.y == doctest::Approx(direct.y).epsilon(1e-10));
  }

  TEST_CASE("pushed jet is the jet of the image curve") {
    const TorusMap f = perturbed_b();
    // gamma(t) = p + t u + t^2/2 c
    const Vec2 p{0.2, 0.6}, u{1.0, 0.3}, c{-0.5, 2.0};
    auto gamma = [&](double t) { return f.lift(p + t * u + 0.5 * t * t * c); };
    const Jet2 j = f.push_jet({p, u, c});
    const double h = 1e-4;
    const Vec2 d1 = (gamma(h) - gamma(-h)) / (2 * h);
    const Vec2 d2 = (gamma(h) - 2.0 * gamma(0.0) + gamma(-h)) / (h * h);
    CHECK(j.d1.x == doctest::Approx(d1.x).epsilon(1e-7));
    CHECK(j.d1.y == doctest::Approx(d1.y).epsilon(1e-7));
    CHECK(j.d2.x == doctest::Approx(d2.x).epsilon(1e-4));
    CHECK(j.d2.y == doctest::Approx(d2.y).epsilon(1e-4));
  }

  TEST_CASE("factored products keep the growth rate of A^n") {
    const Mat2 a{2, 1, 1, 1};
    const double golden_sq = (3.0 + std::sqrt(5.0)) / 2.0;
    FactoredMatrix m;
    for (int k = 0; k < 500; ++k) m.left_multiply(a);
    CHECK(m.log_norm() == doctest::Approx(500 * std::log(golden_sq)).epsilon(1e-12));
    CHECK(m.log_abs_det() == doctest::Approx(0.0).scale(500));
    const Vec2 dir = m.direction_of({0.3, -0.2});
    // Unstable eigenvector of A is (phi, 1) with phi the golden ratio.
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    CHECK(std::fabs(cross(dir, normalized(Vec2{phi, 1.0}))) < 1e-12);
  }

  TEST_CASE("small products agree with dense multiplication") {
    const Mat2 a{2, 1, 1, 1}, b{3, 5, 1, 2}, c{0.5, -0.2, 0.1, 1.5};
    FactoredMatrix m(a);
    m.left_multiply(b);
    m.left_multiply(c);
    const Mat2 dense = c * b * a;
    const Mat2 got = m.matrix();
    CHECK(got.a == doctest::Approx(dense.a));
    CHECK(got.b == doctest::Approx(dense.b));
    CHECK(got.c == doctest::Approx(dense.c));
    CHECK(got.d == doctest::Approx(dense.d));
    CHECK(m.log_norm() == doctest::Approx(std::log(operator_norm(dense))));
  }

  TEST_CASE("singular values of a symmetric matrix are its eigenvalues") {
    const double golden_sq = (3.0 + std::sqrt(5.0)) / 2.0;
    const Mat2 a{2, 1, 1, 1};
    CHECK(operator_norm(a) == doctest::Approx(golden_sq));
    CHECK(min_singular_value(a) == doctest::Approx(1.0 / golden_sq));
  }

  TEST_CASE("bounds from the mode list") {
    const TorusMap f = perturbed_a();
    CHECK(f.perturbation_lipschitz() == doctest::Approx(1.0));
    CHECK(f.second_derivative_bound() == doctest::Approx(0.05 * 2 * kPi));
    CHECK(f.max_abs_det() >= 1.05 - 1e-12);
    CHECK(f.min_abs_det() <= 0.95 + 1e-12);
  }
}
