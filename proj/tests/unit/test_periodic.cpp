#include <cmath>
#include <numeric>
#include <set>

#include "doctest.h"
#include "torus_lab/errors.hpp"
#include "torus_lab/periodic.hpp"

using namespace torus_lab;

namespace {

IntMat2 power(const IntMat2& a, int n) {
  IntMat2 r{1, 0, 0, 1};
  for (int k = 0; k < n; ++k) r = r * a;
  return r;
}

// (M - I)(p, q)/d is integral.
bool fixes(const IntMat2& m, std::int64_t p, std::int64_t q, std::int64_t d) {
  const std::int64_t u = (m.a - 1) * p + m.b * q;
  const std::int64_t v = m.c * p + (m.d - 1) * q;
  return u % d == 0 && v % d == 0;
}

// Lucas numbers L_k, with tr(A^n) = L_{2n} for A = [[2, 1], [1, 1]].
std::int64_t lucas(int k) {
  std::int64_t a = 2, b = 1;
  for (int i = 0; i < k; ++i) {
    const std::int64_t c = a + b;
    a = b;
    b = c;
  }
  return a;
}

}  // namespace

TEST_SUITE("periodic") {
  TEST_CASE("period counts of the cat map") {
    const IntMat2 a{2, 1, 1, 1};
    CHECK(periodic_point_count(a, 1) == 1);
    CHECK(periodic_point_count(a, 2) == 5);
    for (int n = 1; n <= 12; ++n) CHECK(periodic_point_count(a, n) == lucas(2 * n) - 2);
  }

  TEST_CASE("enumerated points are periodic and distinct") {
    const IntMat2 a{2, 1, 1, 1};
    const TorusMap f(a);
    for (int n = 1; n <= 6; ++n) {
      const auto pts = linear_periodic_points(a, n);
      CHECK(static_cast<std::int64_t>(pts.size()) == periodic_point_count(a, n));
      for (const TorusPoint& p : pts) {
        TorusPoint q = p;
        for (int k = 0; k < n; ++k) q = f.apply(q);
        CHECK(torus_distance(p, q) < 1e-9);
      }
      for (std::size_t i = 1; i < pts.size(); ++i) CHECK(torus_distance(pts[i - 1], pts[i]) > 1e-9);
    }
    CHECK_THROWS_AS(linear_periodic_points(a, 12, 1000), EnumerationTooLarge);
  }

  TEST_CASE("common points match a brute-force search on the rational grid") {
    const IntMat2 a{2, 1, 1, 1}, b{3, 5, 1, 2};
    for (int n = 1; n <= 4; ++n) {
      const IntMat2 an = power(a, n), bn = power(b, n);
      const std::int64_t da = periodic_point_count(a, n), db = periodic_point_count(b, n);
      // Every common point has coordinates in (1/gcd) Z.
      const std::int64_t d = std::gcd(da, db);
      std::size_t brute = 0;
      for (std::int64_t p = 0; p < d; ++p) {
        for (std::int64_t q = 0; q < d; ++q) brute += (fixes(an, p, q, d) && fixes(bn, p, q, d)) ? 1 : 0;
      }
      CHECK(linear_common_points(a, b, n).size() == brute);
    }
  }

  TEST_CASE("Newton refinement finds perturbed periodic points") {
    const TorusMap f({2, 1, 1, 1}, {{{1, 0}, {1.0 / (2 * kPi), 0.0}, 0.3}}, 0.05);
    for (const TorusPoint& start : linear_periodic_points(f.matrix(), 3)) {
      const TorusPoint x = refine_periodic_point(f, start, 3);
      TorusPoint y = x;
      for (int k = 0; k < 3; ++k) y = f.apply(y);
      CHECK(torus_distance(x, y) < 1e-10);
    }
  }

  TEST_CASE("origin stays a common fixed point of the packaged perturbed pair") {
    const TorusMap f({2, 1, 1, 1}, {{{1, 0}, {1.0 / (2 * kPi), 0.0}, 0.0}}, 0.05);
    const TorusMap g({3, 5, 1, 2}, {{{0, 1}, {0.0, 1.0 / (2 * kPi)}, 0.0}}, 0.05);
    const PeriodicReport rep = common_periodic_points(f, g, 2);
    REQUIRE(rep.common.size() == 2);
    REQUIRE(rep.common[0].size() == 1);
    CHECK(torus_distance(rep.common[0][0], {0.0, 0.0}) < 1e-12);
    CHECK(periodic_csv(rep).rfind("period,x,y,fx,fy,gx,gy,converged,common\n", 0) == 0);
  }
}
