#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "torus_lab/certify.hpp"
#include "torus_lab/fit.hpp"
#include "torus_lab/random_system.hpp"

namespace torus_lab {

/// Atoms on the projective fiber over `base`: line angles in [0, pi).
struct FiberMeasure {
  TorusPoint base;
  std::vector<double> angles;
  std::vector<double> weights;

  double total() const;
  std::size_t size() const { return angles.size(); }
  /// One atom of weight 1 at the given line.
  static FiberMeasure dirac(const TorusPoint& base, double angle);
  /// `count` equal atoms spread over the open arc of the cone.
  static FiberMeasure spread(const TorusPoint& base, const Cone& cone, int count);
};

/// Fiber over x of mu^{*n} * seed, where the seed family uses the same atoms
/// over every base point: x is pulled back by each of `words` sampled words
/// and every seed line is pushed forward along that orbit. Atom weights are
/// seed weight / words; atoms appear in word order.
FiberMeasure push_fiber(const GeneratorLaw& law, const FiberMeasure& seed, int n, int words, const TorusPoint& x,
                        std::uint64_t seed_value);

struct HolderProfile {
  std::vector<double> radii;
  std::vector<double> mass;  // max atom-centered window mass / total
  double floor = 0.0;        // sampling floor 1/sqrt(words); masses at or below it are not fitted
  double floor_radius = 0.0; // largest radius whose mass is at or below the floor (0 if none)
  LinearFit fit;             // log mass vs log r over the fitted radii
  double alpha = 0.0;        // fit.slope, or 0 if degenerate
  bool degenerate = false;   // fewer than two unsaturated radii above the floor, or slope ~ 0
};

/// Max over atoms a of the mass within projective distance r of a, for each
/// r, plus a log-log slope fit. `words` sets the sampling floor (0: none).
HolderProfile holder_profile(const FiberMeasure& fiber, const std::vector<double>& radii, int words = 0);

/// Hoelder constants (L0, theta) of the unstable line field, fitted from
/// pairs at distances 10^-4..10^-1 under a shared past word.
struct HolderFieldFit {
  double l0 = 0.0;
  double theta = 1.0;
  bool constant_field = false;  // every sampled pair had the same line
  LinearFit fit;
};

HolderFieldFit fit_unstable_holder(const GeneratorLaw& law, const DirectionContext& ctx, int pairs, int n_trunc,
                                   std::uint64_t seed);

struct TransversalityContext {
  Cone cone_u;
  double c4 = 0.0;
  double l0 = 0.0;
  double theta = 1.0;
  double c10 = 0.0;     // max(2 C4, L0)
  double lambda = 0.0;  // max(lambda_{s,-}^theta, lambda_{s,+} / lambda_{u,-})

  static TransversalityContext from(const ConeSystem& cones, const CertReport& cert, const HolderFieldFit& holder);
  /// 5 C10 lambda^n e^{delta n}.
  double threshold(int n, double delta) const;
};

struct TransversalityOutcome {
  bool nontransverse = false;
  double max_angle = 0.0;  // largest angle between the two pushed cone images
  double threshold = 0.0;
};

/// Pushes the boundary rays and the center line of C^u from each word's
/// preimage of p to p; the pair is non-transverse when every cross angle is
/// at most the threshold. Both words must have n letters.
TransversalityOutcome transversality_test(const GeneratorLaw& law, const TransversalityContext& ctx,
                                          const TorusPoint& p, int n, double delta, const Word& word1,
                                          const Word& word2);

struct TransversalityRecord {
  TorusPoint p;
  int n = 0;
  double delta = 0.0;
  double threshold = 0.0;
  int pairs_tested = 0;
  double nontransverse_fraction = 0.0;
  bool vacuous = false;     // threshold >= pi/2
  bool degenerate = false;  // law with a single generator: no separation possible
};

/// Fraction of `trials` random words non-transverse to a fixed reference
/// word drawn from the same seed.
TransversalityRecord nontransverse_mass(const GeneratorLaw& law, const TransversalityContext& ctx,
                                        const TorusPoint& p, int n, double delta, int trials, std::uint64_t seed);

std::string fiber_csv(const FiberMeasure& fiber);
std::string profile_csv(const HolderProfile& profile);

}  // namespace torus_lab
