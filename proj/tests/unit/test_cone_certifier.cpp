#include <cmath>
#include <limits>

#include "doctest.h"
#include "torus_lab/certify.hpp"
#include "torus_lab/errors.hpp"

using namespace torus_lab;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

// Unstable eigenvector angle of [[a, b], [c, d]] with det 1, from the
// characteristic polynomial.
double unstable_angle(double a, double b, double c, double d) {
  const double tr = a + d;
  const double lam = (tr + std::sqrt(tr * tr - 4.0)) / 2.0;
  return std::atan2(lam - a, b);  // (b, lam - a) is an eigenvector
}

}  // namespace

TEST_SUITE("cone_certifier") {
  TEST_CASE("line angles live on the projective line") {
    CHECK(line_angle({1, 0}) == doctest::Approx(0.0));
    CHECK(line_angle({-1, 0}) == doctest::Approx(0.0));
    CHECK(line_angle({0, -1}) == doctest::Approx(kPi / 2));
    CHECK(angle_distance(0.05, kPi - 0.05) == doctest::Approx(0.1));
    CHECK(angle({1, 1}, {-1, -1}) == doctest::Approx(0.0));
    CHECK(slope_angle(kInf) == doctest::Approx(kPi / 2));
    CHECK(slope_angle(-1.0) == doctest::Approx(3 * kPi / 4));
    CHECK_THROWS_AS(line_angle({0, 0}), ZeroVector);
  }

  TEST_CASE("cone membership and arcs") {
    const Cone u = Cone::from_slopes(0.0, 1.0);
    CHECK(u.width == doctest::Approx(kPi / 4));
    CHECK(u.contains(Vec2{1.0, 0.5}));
    CHECK(u.contains(Vec2{-1.0, -0.5}));
    CHECK_FALSE(u.contains(Vec2{1.0, -0.5}));
    const Cone s = Cone::from_slopes(kInf, 0.0);
    CHECK(s.contains(Vec2{-1.0, 1.0}));
    CHECK_FALSE(s.contains(Vec2{1.0, 1.0}));
    CHECK(cone_gap(u, s) == doctest::Approx(0.0).epsilon(1e-12));
  }

  TEST_CASE("cone system validation") {
    ConeSystem cs = ConeSystem::standard();
    CHECK_NOTHROW(cs.validate());
    CHECK(cs.metric_comparison() == doctest::Approx(1.0));
    cs.cone_s = Cone::from_slopes(0.5, 2.0);
    CHECK_THROWS_AS(cs.validate(), InvalidCone);
    cs = ConeSystem::standard();
    cs.metric_u = {1.0, 2.0, 2.0, 1.0};
    CHECK_THROWS_AS(cs.validate(), InvalidCone);
  }

  TEST_CASE("A/B pair certifies with closed-form constants") {
    const TorusMap a({2, 1, 1, 1}), b({3, 5, 1, 2});
    const CertReport r = certify(a, b, ConeSystem::standard(), 64);
    CHECK(r.all_passed());
    CHECK_FALSE(r.witness.has_value());
    // Linear maps: the extremes over the cone slopes [0, 1] are at the
    // boundary rays; |A e1| = sqrt(5), |B (1,1)| / sqrt 2 = sqrt(73 / 2).
    CHECK(r.raw_lambda_u_minus == doctest::Approx(std::sqrt(5.0)));
    CHECK(r.raw_lambda_u_plus == doctest::Approx(std::sqrt(73.0 / 2.0)).epsilon(1e-6));
    CHECK(r.lambda_u_minus >= 2.2);
    const double gap = unstable_angle(2, 1, 1, 1) - unstable_angle(3, 5, 1, 2);
    CHECK(r.theta_delta == doctest::Approx(gap).epsilon(1e-9));
    CHECK(r.theta_delta >= 0.2);
    CHECK(r.c0pp == doctest::Approx(1.0));
  }

  TEST_CASE("A/A pair fails transversality with a witness") {
    const TorusMap a({2, 1, 1, 1});
    const CertReport r = certify(a, a, ConeSystem::standard(), 64);
    CHECK(r.passed[0]);
    CHECK(r.passed[1]);
    CHECK_FALSE(r.passed[2]);
    CHECK_FALSE(r.passed[3]);
    REQUIRE(r.witness.has_value());
    CHECK(r.witness->condition == "C3");
    CHECK(r.theta_delta == doctest::Approx(0.0).scale(1.0));
  }

  TEST_CASE("single map unstable line is the eigenvector") {
    const TorusMap a({2, 1, 1, 1});
    const ConeSystem cs = ConeSystem::standard();
    const Vec2 eu = map_unstable_line(a, cs.cone_u, {0.3, 0.4}, 40);
    const Vec2 es = map_stable_line(a, cs.cone_s, {0.3, 0.4}, 40);
    CHECK(line_angle(eu) == doctest::Approx(unstable_angle(2, 1, 1, 1)).epsilon(1e-12));
    // Stable eigenvector of a symmetric matrix is orthogonal to the unstable one.
    CHECK(std::fabs(dot(normalized(eu), normalized(es))) < 1e-12);
  }

  TEST_CASE("grid below the minimum is rejected") {
    const TorusMap a({2, 1, 1, 1}), b({3, 5, 1, 2});
    CHECK_THROWS_AS(certify(a, b, ConeSystem::standard(), 32), InvalidArgument);
  }

  TEST_CASE("report formatting is key=value") {
    const TorusMap a({2, 1, 1, 1}), b({3, 5, 1, 2});
    const std::string text = format_report(certify(a, b, ConeSystem::standard(), 64));
    CHECK(text.find("passed=true\n") == 0);
    CHECK(text.find("lambda_u_minus=") != std::string::npos);
  }
}
