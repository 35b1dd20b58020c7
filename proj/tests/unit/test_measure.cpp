#include <cmath>

#include "doctest.h"
#include "torus_lab/errors.hpp"
#include "torus_lab/measure.hpp"
#include "torus_lab/parallel.hpp"

using namespace torus_lab;

namespace {

// Plane lens area, written out independently of the library.
double lens_oracle(double d, double r) {
  if (d >= 2 * r) return 0.0;
  return 2 * r * r * std::acos(d / (2 * r)) - 0.5 * d * std::sqrt(4 * r * r - d * d);
}

GridMeasure random_grid(int n, std::uint64_t seed) {
  GridMeasure m(n);
  CounterRng rng(seed);
  for (double& v : m.mass) v = rng.uniform();
  return m;
}

}  // namespace

TEST_SUITE("measure_lab") {
  TEST_CASE("grid basics") {
    const GridMeasure u = GridMeasure::uniform(64, 2.0);
    CHECK(u.total() == doctest::Approx(2.0));
    CHECK(u.normalized().total() == doctest::Approx(1.0));
    const GridMeasure c = u.coarse(8);
    CHECK(c.n == 8);
    CHECK(c.at(3, 5) == doctest::Approx(2.0 / 64));
    CHECK(u.cell_index({0.999, 0.0}) == 63 * 64);
  }

  TEST_CASE("lens area matches the closed form") {
    for (double d : {0.0, 0.01, 0.05, 0.099, 0.1, 0.3}) {
      CHECK(lens_area(d, 0.05) == doctest::Approx(lens_oracle(d, 0.05)).epsilon(1e-12));
    }
    CHECK(lens_area(0.0, 0.05) == doctest::Approx(kPi * 0.0025));
  }

  TEST_CASE("rho-norm of Lebesgue is pi") {
    const GridBallMass balls(GridMeasure::uniform(1024));
    for (double rho : {0.05, 0.1}) {
      CHECK(rho_norm(balls, rho, SmoothReference::lebesgue(), 256) == doctest::Approx(kPi).epsilon(0.01));
    }
  }

  TEST_CASE("rho-norm of a point mass is sqrt(pi) / rho") {
    GridMeasure m(1024);
    m.deposit({0.3, 0.7}, 1.0);
    const GridBallMass balls(m);
    for (double rho : {0.05, 0.1}) {
      CHECK(rho_norm(balls, rho, SmoothReference::lebesgue(), 256) ==
            doctest::Approx(std::sqrt(kPi) / rho).epsilon(0.02));
    }
    // Exact lens sum for a single atom: rho^-4 * pi rho^2.
    const PointCloudMeasure cloud({{0.3, 0.7}}, {1.0});
    CHECK(std::sqrt(cloud_rho_inner(cloud, cloud, 0.05)) == doctest::Approx(std::sqrt(kPi) / 0.05));
  }

  TEST_CASE("grid ball masses agree with brute force") {
    const GridMeasure m = random_grid(256, 5);
    const GridBallMass balls(m);
    for (int k = 0; k < 10; ++k) {
      const TorusPoint z(0.17 * k + 0.03, 0.41 * k + 0.07);
      const double rho = 0.05 + 0.01 * k;
      double brute = 0.0;
      for (int i = 0; i < m.n; ++i) {
        for (int j = 0; j < m.n; ++j) {
          if (torus_distance(z, m.center(i, j)) < rho) brute += m.at(i, j);
        }
      }
      CHECK(balls(z, rho) == doctest::Approx(brute).epsilon(1e-12));
    }
  }

  TEST_CASE("grid ball masses refuse coarse grids") {
    const GridBallMass balls(GridMeasure::uniform(64));
    CHECK_THROWS_AS(balls({0.5, 0.5}, 0.05), ResolutionTooCoarse);
    CHECK_THROWS_AS(balls({0.5, 0.5}, 0.3), InvalidArgument);
  }

  TEST_CASE("cloud ball masses agree with brute force") {
    std::vector<TorusPoint> pts;
    std::vector<double> w;
    CounterRng rng(11);
    for (int k = 0; k < 2000; ++k) {
      pts.emplace_back(rng.uniform(), rng.uniform());
      w.push_back(rng.uniform());
    }
    const PointCloudMeasure cloud(pts, w, 0.03);
    for (int k = 0; k < 10; ++k) {
      const TorusPoint z(rng.uniform(), rng.uniform());
      double brute = 0.0;
      for (std::size_t i = 0; i < pts.size(); ++i) brute += torus_distance(z, pts[i]) < 0.07 ? w[i] : 0.0;
      CHECK(cloud.ball_mass(z, 0.07) == doctest::Approx(brute).epsilon(1e-12));
    }
  }

  TEST_CASE("cloud inner product matches the lens double sum") {
    std::vector<TorusPoint> pts{{0.1, 0.1}, {0.12, 0.11}, {0.95, 0.1}, {0.5, 0.5}};
    std::vector<double> w{0.4, 0.3, 0.2, 0.1};
    const PointCloudMeasure cloud(pts, w);
    const double rho = 0.06;
    double brute = 0.0;
    for (std::size_t a = 0; a < pts.size(); ++a) {
      for (std::size_t b = 0; b < pts.size(); ++b) brute += w[a] * w[b] * lens_oracle(torus_distance(pts[a], pts[b]), rho);
    }
    CHECK(cloud_rho_inner(cloud, cloud, rho) == doctest::Approx(brute / std::pow(rho, 4)).epsilon(1e-12));
  }

  TEST_CASE("scale comparison constant of a flat curve is 1") {
    const GridBallMass balls(GridMeasure::uniform(1024));
    const RhoNormCurve c = rho_norm_curve(balls, {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64}, SmoothReference::lebesgue(), 128);
    CHECK(c.c1_fit == doctest::Approx(1.0).epsilon(0.02));
    CHECK(c.max_halving_ratio == doctest::Approx(1.0).epsilon(0.02));
  }

  TEST_CASE("smooth reference validation") {
    SmoothReference m;
    m.terms.push_back({{1, 0}, 0.5, 0.0});
    CHECK_NOTHROW(m.validate());
    CHECK(m.c0() == doctest::Approx(2.0));
    CHECK(m.density({0.25, 0.0}) == doctest::Approx(1.5));
    m.terms.push_back({{0, 1}, 0.6, 0.0});
    CHECK_THROWS_AS(m.validate(), InvalidArgument);
  }

  TEST_CASE("coarse distance") {
    GridMeasure a(4), b(4);
    a.at(0, 0) = 1.0;
    b.at(3, 3) = 1.0;
    CHECK(coarse_distance(a, b, 4) == doctest::Approx(1.0));
    CHECK(coarse_distance(a, a, 2) == doctest::Approx(0.0));
    CHECK(coarse_distance(GridMeasure::uniform(8), GridMeasure::uniform(8, 3.0), 4) == doctest::Approx(0.0));
  }

  TEST_CASE("stationary estimate is independent of thread count") {
    const GeneratorLaw law = GeneratorLaw::pair(TorusMap({2, 1, 1, 1}), TorusMap({3, 5, 1, 2}));
    set_thread_count(1);
    const GridMeasure one = estimate_stationary(law, {0.1, 0.2}, 50, 300, 5, 7, 16);
    set_thread_count(3);
    const GridMeasure three = estimate_stationary(law, {0.1, 0.2}, 50, 300, 5, 7, 16);
    set_thread_count(0);
    CHECK(one.mass == three.mass);
    CHECK(one.total() == doctest::Approx(1.0));
  }

  TEST_CASE("convolution keeps the mass") {
    const GeneratorLaw law = GeneratorLaw::pair(TorusMap({2, 1, 1, 1}), TorusMap({3, 5, 1, 2}));
    const PointCloudMeasure nu({{0.1, 0.1}, {0.4, 0.8}}, {0.25, 0.5});
    const PointCloudMeasure pushed = convolve_power(law, 3, nu, 8, 1);
    CHECK(pushed.size() == 16);
    CHECK(pushed.total() == doctest::Approx(0.75));
  }
}
