#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "torus_lab/equidistribution.hpp"
#include "torus_lab/errors.hpp"
#include "torus_lab/harness.hpp"

using namespace torus_lab;

namespace {

const TorusMap kA({2, 1, 1, 1});
const TorusMap kB({3, 5, 1, 2});

}  // namespace

TEST_SUITE("equidistribution_harness") {
  TEST_CASE("random families carry the requested mass inside the cone") {
    const Cone u = ConeSystem::standard().cone_u;
    FamilyOptions fo;
    fo.total_mass = 2.5;
    const CurveFamily fam = random_family(u, fo, 3);
    CHECK(fam.size() >= 1);
    CHECK(fam.size() <= 4);
    CHECK(family_mass(fam) == doctest::Approx(2.5));
    for (const CurveJet& c : fam) {
      CHECK(c.length() >= 0.1 - 1e-9);
      CHECK(c.length() <= 0.3 + 1e-9);
      CHECK(u.contains(c.jets.front().d1));
      CHECK(c.log_density_lipschitz() <= 1.0 + 1e-9);
    }
  }

  TEST_CASE("discretized and sampled families keep the mass") {
    const CurveFamily fam = random_family(ConeSystem::standard().cone_u, {}, 5);
    CHECK(discretize_family(fam, 1e-3, 0.01).total() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sample_family(fam, 1000, 1, 0.01).total() == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("epsilon budget is the smallest admissible term") {
    const CertReport cert = certify(kA, kB, ConeSystem::standard(), 64);
    const double alpha = 0.2, eta = 0.3, theta = 1.0;
    const double expect = 0.99 * std::min({1.0, (1.0 + cert.lambda_u_minus) / 2.0, -alpha * std::log(eta) / 8.0,
                                           -alpha * theta * std::log(cert.lambda_s_minus) / 10.0,
                                           -alpha * std::log(cert.lambda_s_plus / cert.lambda_u_minus) / 10.0});
    CHECK(epsilon_budget(cert, alpha, eta, theta) == doctest::Approx(expect));
  }

  TEST_CASE("squared norm of one segment matches the thin-strip formula") {
    // nu = normalized length on a segment of length l: for rho << l,
    // |nu|^2_rho = rho^-4 * l * int (2 sqrt(rho^2 - s^2) / l)^2 ds = 16 / (3 l rho).
    const double l = 0.3, rho = 1.0 / 256;
    CurveFamily fam{CurveJet::segment({0.2, 0.2}, {1.0, 0.4}, l, 1.0 / 1024)};
    const GeneratorLaw law = GeneratorLaw::pair(kA, kB);
    const auto pts = cesaro_norm_bound(law, fam, {1}, rho, HarnessOptions{}, 1);
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].value == doctest::Approx(16.0 / (3.0 * l * rho)).epsilon(0.03));
  }

  TEST_CASE("key estimate sides are consistent") {
    const GeneratorLaw law = GeneratorLaw::pair(kA, kB);
    const CertReport cert = certify(kA, kB, ConeSystem::standard(), 64);
    const CurveFamily fam = random_family(ConeSystem::standard().cone_u, {}, 8);
    HarnessOptions ho;
    ho.samples = 20000;
    const KeyEstimateResult r = key_estimate_check(law, cert, fam, sample_word(law, 4, 2), 4, 0.01, ho, 3);
    CHECK(r.lhs > 0.0);
    CHECK(r.rhs > 0.0);
    CHECK(r.ratio == doctest::Approx(r.lhs / r.rhs));
    CHECK(r.passed == (r.lhs <= r.rhs));
    ho.strict = true;
    CHECK_THROWS_AS(key_estimate_check(law, cert, fam, sample_word(law, 4, 2), 4, 0.01, ho, 3), HypothesisViolated);
  }

  TEST_CASE("scale constant from curves") {
    RhoNormCurve a{{0.1, 0.05}, {1.0, 1.2}, 0.0, 0.0};
    RhoNormCurve b{{0.1, 0.05}, {2.0, 1.0}, 0.0, 0.0};
    summarize_curve(a);
    summarize_curve(b);
    CHECK(fit_scale_constant({a, b}) == doctest::Approx(2.0));
  }

  TEST_CASE("harness CSV headers") {
    CHECK(key_estimate_csv({}).rfind("n,rho,lhs,rhs,pass\n", 0) == 0);
    CHECK(cesaro_csv({}).rfind("m,norm_sq\n", 0) == 0);
  }

  TEST_CASE("orbits of the linear pair equidistribute to Lebesgue") {
    const GeneratorLaw law = GeneratorLaw::pair(kA, kB);
    const GridMeasure leb = GridMeasure::uniform(16);
    const EquidistRun run = equidistribution_run(law, {0.123, 0.456}, {2, 200}, 2000, 8, leb, 1);
    REQUIRE(run.distances.size() == 2);
    CHECK(run.distances[1] < 0.05);
    CHECK(run.distances[1] < run.distances[0]);
    CHECK(min_cell_mass(leb, 8) == doctest::Approx(1.0 / 64));
    CHECK(equidist_csv(run).rfind("n,distance\n", 0) == 0);
  }
}
