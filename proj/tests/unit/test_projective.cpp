#include <cmath>

#include "doctest.h"
#include "torus_lab/projective.hpp"

using namespace torus_lab;

namespace {

const TorusMap kA({2, 1, 1, 1});
const TorusMap kB({3, 5, 1, 2});

}  // namespace

TEST_SUITE("projective_lab") {
  TEST_CASE("fiber seeds") {
    const Cone u = ConeSystem::standard().cone_u;
    const FiberMeasure d = FiberMeasure::dirac({0.1, 0.2}, 0.3);
    CHECK(d.total() == doctest::Approx(1.0));
    const FiberMeasure s = FiberMeasure::spread({0.1, 0.2}, u, 10);
    CHECK(s.size() == 10);
    CHECK(s.total() == doctest::Approx(1.0));
    for (double a : s.angles) CHECK(u.contains(a));
  }

  TEST_CASE("single linear map pushes every line to the unstable eigenline") {
    const GeneratorLaw law = GeneratorLaw::single(kA);
    const Cone u = ConeSystem::standard().cone_u;
    const FiberMeasure fb = push_fiber(law, FiberMeasure::spread({0, 0}, u, 5), 12, 10, {0.3, 0.7}, 1);
    CHECK(fb.size() == 50);
    CHECK(fb.total() == doctest::Approx(1.0));
    const double eigen = std::atan((std::sqrt(5.0) - 1.0) / 2.0);
    for (double a : fb.angles) CHECK(angle_distance(a, eigen) < 1e-9);
  }

  TEST_CASE("profile of evenly spread atoms has slope 1") {
    FiberMeasure fb;
    const int n = 20000;
    for (int k = 0; k < n; ++k) {
      fb.angles.push_back(kPi * k / n);
      fb.weights.push_back(1.0 / n);
    }
    const HolderProfile hp = holder_profile(fb, {1e-3, 3e-3, 1e-2, 3e-2, 1e-1});
    CHECK_FALSE(hp.degenerate);
    CHECK(hp.alpha == doctest::Approx(1.0).epsilon(0.02));
    // Window of half-width r holds 2 r / pi of the mass.
    CHECK(hp.mass.back() == doctest::Approx(0.2 / kPi).epsilon(0.01));
  }

  TEST_CASE("a single atom is degenerate") {
    const HolderProfile hp = holder_profile(FiberMeasure::dirac({0, 0}, 0.4), {1e-3, 1e-2, 1e-1}, 100);
    CHECK(hp.degenerate);
    CHECK(hp.alpha == 0.0);
  }

  TEST_CASE("transversality threshold formula") {
    const CertReport cert = certify(kA, kB, ConeSystem::standard(), 64);
    HolderFieldFit holder;
    holder.l0 = 0.0;
    holder.theta = 1.0;
    const TransversalityContext ctx = TransversalityContext::from(ConeSystem::standard(), cert, holder);
    const double lambda = std::max(cert.lambda_s_minus, cert.lambda_s_plus / cert.lambda_u_minus);
    CHECK(ctx.lambda == doctest::Approx(lambda));
    CHECK(ctx.c10 == doctest::Approx(std::max(2 * cert.c4, 0.0)));
    CHECK(ctx.threshold(7, 0.1) == doctest::Approx(5 * ctx.c10 * std::pow(lambda, 7) * std::exp(0.7)));
  }

  TEST_CASE("identical words are non-transverse; different last letters are transverse") {
    const GeneratorLaw law = GeneratorLaw::pair(kA, kB);
    const ConeSystem cones = ConeSystem::standard();
    const CertReport cert = certify(kA, kB, cones, 64);
    const TransversalityContext ctx = TransversalityContext::from(cones, cert, HolderFieldFit{});
    const Word w{{0, 1, 0, 0, 1, 1, 0, 1, 0, 0}, 0};
    CHECK(transversality_test(law, ctx, {0.3, 0.7}, 10, 0.0, w, w).nontransverse);
    Word v = w;
    v.indices.back() = 1;
    const TransversalityOutcome out = transversality_test(law, ctx, {0.3, 0.7}, 10, 0.0, w, v);
    CHECK_FALSE(out.nontransverse);
    CHECK(out.max_angle > 0.1);
  }

  TEST_CASE("single-generator laws are flagged degenerate") {
    const GeneratorLaw law = GeneratorLaw::single(kA);
    const CertReport cert = certify(kA, kB, ConeSystem::standard(), 64);
    const TransversalityContext ctx = TransversalityContext::from(ConeSystem::standard(), cert, HolderFieldFit{});
    const TransversalityRecord rec = nontransverse_mass(law, ctx, {0.3, 0.7}, 6, 0.0, 10, 1);
    CHECK(rec.degenerate);
    CHECK(rec.nontransverse_fraction == doctest::Approx(1.0));
  }

  TEST_CASE("linear unstable field is constant") {
    const GeneratorLaw law = GeneratorLaw::pair(kA, kB);
    const CertReport cert = certify(kA, kB, ConeSystem::standard(), 64);
    const HolderFieldFit hf = fit_unstable_holder(law, DirectionContext::from(ConeSystem::standard(), cert), 20, 30, 1);
    CHECK(hf.constant_field);
    CHECK(hf.l0 == 0.0);
  }

  TEST_CASE("CSV headers") {
    CHECK(fiber_csv(FiberMeasure::dirac({0, 0}, 0.1)).rfind("angle,weight\n", 0) == 0);
    CHECK(profile_csv(HolderProfile{}).rfind("r,mass,slope\n", 0) == 0);
  }
}
