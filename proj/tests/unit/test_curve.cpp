#include <cmath>

#include "doctest.h"
#include "torus_lab/curve.hpp"
#include "torus_lab/errors.hpp"

using namespace torus_lab;

namespace {

TorusMap perturbed_a() { return TorusMap({2, 1, 1, 1}, {{{1, 0}, {1.0 / (2 * kPi), 0.0}, 0.0}}, 0.05); }
TorusMap perturbed_b() { return TorusMap({3, 5, 1, 2}, {{{0, 1}, {0.0, 1.0 / (2 * kPi)}, 0.0}}, 0.05); }

CurveJet circle_arc(double radius, int nodes) {
  CurveJet c;
  for (int k = 0; k <= nodes; ++k) {
    const double t = 1.0 * k / nodes;
    c.t.push_back(t);
    c.jets.push_back({{radius * std::cos(t), radius * std::sin(t)},
                      {-radius * std::sin(t), radius * std::cos(t)},
                      {-radius * std::cos(t), -radius * std::sin(t)}});
    c.log_density.push_back(0.0);
    c.dlog_density.push_back(0.0);
  }
  return c;
}

}  // namespace

TEST_SUITE("curve_engine") {
  TEST_CASE("segments") {
    const CurveJet c = CurveJet::segment({0.1, 0.2}, {3.0, 4.0}, 0.2, 1.0 / 100, 2.0, 1.5);
    CHECK(c.length() == doctest::Approx(0.2));
    CHECK(c.mass() == doctest::Approx(2.0));
    CHECK(c.max_abs_curvature() == doctest::Approx(0.0));
    CHECK(c.log_density_lipschitz() == doctest::Approx(1.5));
    const Vec2 mid = c.position_at_arclength(0.1);
    CHECK(mid.x == doctest::Approx(0.1 + 0.06));
    CHECK(mid.y == doctest::Approx(0.2 + 0.08));
    CHECK_THROWS_AS(CurveJet::segment({0, 0}, {1, 0}, 0.0, 0.01), InvalidArgument);
  }

  TEST_CASE("circle arcs have curvature 1 / R and length R") {
    const CurveJet c = circle_arc(0.3, 64);
    CHECK(c.max_abs_curvature() == doctest::Approx(1.0 / 0.3));
    CHECK(c.length() == doctest::Approx(0.3).epsilon(1e-10));
    const CurveJet u = to_unit_speed(c);
    for (const Jet2& j : u.jets) CHECK(norm(j.d1) == doctest::Approx(1.0));
    CHECK(u.max_abs_curvature() == doctest::Approx(1.0 / 0.3));
  }

  TEST_CASE("linear pushes stretch by |A u| and keep the mass") {
    const TorusMap a({2, 1, 1, 1});
    const Vec2 u = normalized(Vec2{1.0, 0.5});
    const CurveJet c = CurveJet::segment({0.2, 0.3}, u, 0.1, 1.0 / 256, 1.0, 2.0);
    const CurveJet p = push_curve_once(a, c);
    const double stretch = norm(a.matrix().to_real() * u);
    CHECK(p.length() == doctest::Approx(0.1 * stretch));
    CHECK(p.mass() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.max_abs_curvature() < 1e-9);
    CHECK(p.log_density_lipschitz() == doctest::Approx(2.0 / stretch));
  }

  TEST_CASE("exact transport conserves mass for perturbed words") {
    const GeneratorLaw law = GeneratorLaw::pair(perturbed_a(), perturbed_b());
    const ConeSystem cones = ConeSystem::standard();
    const CurveJet c = CurveJet::segment({0.4, 0.4}, cones.cone_u.direction(0.5), 0.02, 1.0 / 512);
    const CurveJet p = push_curve(law, c, sample_word(law, 8, 3), false);
    CHECK(p.mass() == doctest::Approx(c.mass()).epsilon(1e-12));
  }

  TEST_CASE("resampled pushes keep unit speed and stay in the cone") {
    const GeneratorLaw law = GeneratorLaw::pair(perturbed_a(), perturbed_b());
    const ConeSystem cones = ConeSystem::standard();
    PushOptions po;
    po.cone_u = cones.cone_u;
    po.max_length = 0.5;
    const CurveJet c = CurveJet::segment({0.4, 0.4}, cones.cone_u.direction(0.5), 0.05, 1.0 / 512);
    const CurveJet p = push_curve(law, c, sample_word(law, 12, 4), true, po);
    // The window applies before each block of resample_every maps; the last
    // block of this 12-letter word has two maps, each stretching by at most 6.1.
    CHECK(p.length() <= 0.5 * 6.1 * 6.1);
    for (const Jet2& j : p.jets) {
      CHECK(norm(j.d1) == doctest::Approx(1.0));
      CHECK(cones.cone_u.contains(j.d1));
    }
  }

  TEST_CASE("leaving the cone is reported") {
    const GeneratorLaw law = GeneratorLaw::single(TorusMap({2, 1, 1, 1}));
    PushOptions po;
    po.cone_u = ConeSystem::standard().cone_u;
    const CurveJet c = CurveJet::segment({0.4, 0.4}, {0.0, 1.0}, 0.05, 1.0 / 128);
    // The stable eigenvector of A stays stable, outside C^u.
    const CurveJet s = CurveJet::segment({0.4, 0.4}, {-1.0, (1.0 + std::sqrt(5.0)) / 2.0}, 0.05, 1.0 / 128);
    CHECK_THROWS_AS(push_curve(law, s, sample_word(law, 1, 1), false, po), ConeExit);
    CHECK_NOTHROW(push_curve(law, c, sample_word(law, 2, 1), false, {}));
  }

  TEST_CASE("K0 is 1 for linear laws") {
    const GeneratorLaw law = GeneratorLaw::pair(TorusMap({2, 1, 1, 1}), TorusMap({3, 5, 1, 2}));
    const KZero k = compute_k0(law, ConeSystem::standard(), 3, 50, 1);
    CHECK(k.k0 == doctest::Approx(1.0));
  }

  TEST_CASE("K0 bounds one-step curvature of perturbed pushes") {
    const GeneratorLaw law = GeneratorLaw::pair(perturbed_a(), perturbed_b());
    const KZero k = compute_k0(law, ConeSystem::standard(), 5, 500, 2);
    CHECK(k.a < 1.0);
    CHECK(k.k0 == doctest::Approx(2 * k.b / (1 - k.a)));
  }

  TEST_CASE("density ratio is 1 for linear laws") {
    const TorusMap a({2, 1, 1, 1}), b({3, 5, 1, 2});
    const GeneratorLaw law = GeneratorLaw::pair(a, b);
    const CertReport cert = certify(a, b, ConeSystem::standard(), 64);
    const CurveContext ctx = CurveContext::from(ConeSystem::standard(), cert);
    const DensityRatio r = density_ratio_at_offset(law, ctx, sample_word(law, 40, 1), {0.3, 0.3}, 0.01, 30);
    CHECK(r.ratio == doctest::Approx(1.0).epsilon(1e-9));
  }

  TEST_CASE("curve measure samples lie on the curve") {
    const CurveJet c = CurveJet::segment({0.1, 0.1}, {1.0, 0.0}, 0.3, 1.0 / 256, 0.5, 3.0);
    const PointCloudMeasure m = sample_curve_measure(c, 20000, 9);
    CHECK(m.total() == doctest::Approx(0.5));
    double mean_x = 0.0;
    for (const TorusPoint& p : m.points()) {
      CHECK(p.y == doctest::Approx(0.1));
      mean_x += (p.x - 0.1) / m.size();
    }
    // Density proportional to exp(3 s) on [0, 0.3]: mean of s in closed form.
    const double l = 0.3, k = 3.0;
    const double mean = (l * std::exp(k * l) / (std::exp(k * l) - 1.0)) - 1.0 / k;
    CHECK(mean_x == doctest::Approx(mean).epsilon(0.01));
  }

  TEST_CASE("curve CSV header") {
    const std::string csv = curve_csv(CurveJet::segment({0, 0}, {1, 0}, 0.01, 0.005));
    CHECK(csv.rfind("t,x,y,dx,dy,kappa,log_density\n", 0) == 0);
  }
}
