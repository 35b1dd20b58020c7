#include <cmath>

#include "doctest.h"
#include "torus_lab/errors.hpp"
#include "torus_lab/random_system.hpp"

using namespace torus_lab;

namespace {

TorusMap map_a() { return TorusMap({2, 1, 1, 1}); }
TorusMap map_b() { return TorusMap({3, 5, 1, 2}); }
TorusMap perturbed_a() { return TorusMap({2, 1, 1, 1}, {{{1, 0}, {1.0 / (2 * kPi), 0.0}, 0.0}}, 0.05); }
TorusMap perturbed_b() { return TorusMap({3, 5, 1, 2}, {{{0, 1}, {0.0, 1.0 / (2 * kPi)}, 0.0}}, 0.05); }

}  // namespace

TEST_SUITE("random_system") {
  TEST_CASE("law validation") {
    GeneratorLaw law{{map_a(), map_b()}, {0.5, 0.4}};
    CHECK_THROWS_AS(law.validate(), InvalidArgument);
    law.weights = {1.2, -0.2};
    CHECK_THROWS_AS(law.validate(), InvalidArgument);
    law.weights = {0.3};
    CHECK_THROWS_AS(law.validate(), InvalidArgument);
    CHECK_NOTHROW(GeneratorLaw::pair(map_a(), map_b(), 0.3).validate());
  }

  TEST_CASE("words are deterministic and follow the weights") {
    const GeneratorLaw law = GeneratorLaw::pair(map_a(), map_b(), 0.3);
    const Word w1 = sample_word(law, 100000, 42);
    const Word w2 = sample_word(law, 100000, 42);
    CHECK(w1.indices == w2.indices);
    CHECK(sample_word(law, 100, 43).indices != std::vector<int>(w1.indices.begin(), w1.indices.begin() + 100));
    double zeros = 0;
    for (int i : w1.indices) zeros += i == 0 ? 1 : 0;
    // Binomial(1e5, 0.3): sd ~ 145 counts; allow 5 sd.
    CHECK(std::fabs(zeros - 30000.0) < 5 * std::sqrt(100000 * 0.21));
  }

  TEST_CASE("composition applies letters in order") {
    const GeneratorLaw law = GeneratorLaw::pair(perturbed_a(), perturbed_b());
    const Word w{{0, 1, 1, 0}, 0};
    const TorusPoint p(0.12, 0.34);
    TorusPoint q = p;
    for (int i : w.indices) q = law.maps[i].apply(q);
    CHECK(torus_distance(compose_apply(law, w, p), q) < 1e-12);

    Mat2 m = Mat2::identity();
    TorusPoint r = p;
    for (int i : w.indices) {
      m = law.maps[i].differential(r) * m;
      r = law.maps[i].apply(r);
    }
    const Mat2 got = compose_differential(law, w, p).matrix();
    CHECK(got.a == doctest::Approx(m.a));
    CHECK(got.b == doctest::Approx(m.b));
    CHECK(got.c == doctest::Approx(m.c));
    CHECK(got.d == doctest::Approx(m.d));
  }

  TEST_CASE("directions of a single linear map are its eigenvectors") {
    const TorusMap a = map_a();
    const GeneratorLaw law = GeneratorLaw::single(a);
    const CertReport cert = certify(map_a(), map_b(), ConeSystem::standard(), 64);
    const DirectionContext ctx = DirectionContext::from(ConeSystem::standard(), cert);
    const Word w = sample_word(law, 60, 1);
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    const LineEstimate eu = unstable_direction(law, ctx, w, {0.2, 0.3}, 30);
    const LineEstimate es = stable_direction(law, ctx, w, {0.2, 0.3}, 30);
    CHECK(angle(eu.line, {phi, 1.0}) <= eu.error_bound + 1e-12);
    CHECK(angle(es.line, {-1.0, phi}) <= es.error_bound + 1e-12);
    CHECK(eu.error_bound < 1e-6);
  }

  TEST_CASE("determinant product vanishes for volume-preserving linear maps") {
    const GeneratorLaw law = GeneratorLaw::pair(map_a(), map_b());
    const CertReport cert = certify(map_a(), map_b(), ConeSystem::standard(), 64);
    const DirectionContext ctx = DirectionContext::from(ConeSystem::standard(), cert);
    for (int k = 0; k < 5; ++k) {
      const Word past = sample_word(law, 30, derive_seed(9, k));
      const Word future = sample_word(law, 50, derive_seed(10, k));
      // log |Df^n|_F| + log |Df^n|_E| = log |det| - log of the angle change,
      // which is bounded; over n = 20 it averages to nearly 0.
      CHECK(std::fabs(determinant_product_check(law, ctx, past, future, {0.4, 0.6}, 20, 30)) < 0.1);
    }
  }

  TEST_CASE("uniform expansion margin of A alone is log of its smallest singular value") {
    const GeneratorLaw law = GeneratorLaw::single(map_a());
    const double golden_sq = (3.0 + std::sqrt(5.0)) / 2.0;
    // Linear: log |A^N v| is minimized at the stable eigenvector, value -N log(golden^2).
    CHECK(uniform_expansion_margin(law, 1, 2, 64) == doctest::Approx(-std::log(golden_sq)).epsilon(1e-6));
    CHECK(uniform_expansion_margin(law, 3, 2, 64) == doctest::Approx(-3 * std::log(golden_sq)).epsilon(1e-6));
  }

  TEST_CASE("enumeration limit") {
    const GeneratorLaw law = GeneratorLaw::pair(map_a(), map_b());
    CHECK_THROWS_AS(uniform_expansion_margin(law, 21, 2, 16), EnumerationTooLarge);
    CHECK_THROWS_AS(uniform_expansion_margin(law, 2, 2, 2), InvalidArgument);
  }
}
