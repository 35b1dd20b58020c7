#include "torus_lab/projective.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "torus_lab/errors.hpp"
#include "torus_lab/format.hpp"
#include "torus_lab/parallel.hpp"

namespace torus_lab {
namespace {

// Preimages x_{-n}, ..., x_{-1} of x under the word; orbit[k] is mapped by
// letter k to orbit[k + 1], and orbit[n] = x.
std::vector<TorusPoint> backward_orbit(const GeneratorLaw& law, const Word& w, const TorusPoint& x) {
  const std::size_t n = w.size();
  std::vector<TorusPoint> orbit(n + 1);
  orbit[n] = x;
  for (std::size_t k = n; k-- > 0;) orbit[k] = law.maps[w.indices[k]].inverse(orbit[k + 1]);
  return orbit;
}

Vec2 push_line(const GeneratorLaw& law, const Word& w, const std::vector<TorusPoint>& orbit, Vec2 v) {
  for (std::size_t k = 0; k < w.size(); ++k) v = normalized(law.maps[w.indices[k]].differential(orbit[k]) * v);
  return v;
}

bool single_generator(const GeneratorLaw& law) {
  int positive = 0;
  for (double w : law.weights) positive += w > 0.0 ? 1 : 0;
  return positive <= 1;
}

}  // namespace

double FiberMeasure::total() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

FiberMeasure FiberMeasure::dirac(const TorusPoint& base, double angle) {
  return {base, {std::fmod(std::fmod(angle, kPi) + kPi, kPi)}, {1.0}};
}

FiberMeasure FiberMeasure::spread(const TorusPoint& base, const Cone& cone, int count) {
  if (count < 1) throw InvalidArgument("FiberMeasure::spread: count must be >= 1");
  FiberMeasure f{base, {}, {}};
  for (int i = 0; i < count; ++i) {
    f.angles.push_back(cone.at((i + 0.5) / count));
    f.weights.push_back(1.0 / count);
  }
  return f;
}

FiberMeasure push_fiber(const GeneratorLaw& law, const FiberMeasure& seed, int n, int words, const TorusPoint& x,
                        std::uint64_t seed_value) {
  law.validate();
  if (n < 0 || words < 1) throw InvalidArgument("push_fiber: need n >= 0 and words >= 1");
  if (seed.size() == 0) throw InvalidArgument("push_fiber: empty seed fiber");
  FiberMeasure out{x, {}, {}};
  if (n == 0) {
    out.angles = seed.angles;
    out.weights = seed.weights;
    return out;
  }
  const std::size_t m = seed.size();
  out.angles.resize(m * static_cast<std::size_t>(words));
  out.weights.resize(out.angles.size());
  parallel_for(static_cast<std::size_t>(words), [&](unsigned, std::size_t k) {
    const Word w = sample_word(law, static_cast<std::size_t>(n), derive_seed(seed_value, k));
    const std::vector<TorusPoint> orbit = backward_orbit(law, w, x);
    for (std::size_t a = 0; a < m; ++a) {
      out.angles[k * m + a] = line_angle(push_line(law, w, orbit, line_vector(seed.angles[a])));
      out.weights[k * m + a] = seed.weights[a] / words;
    }
  });
  return out;
}

HolderProfile holder_profile(const FiberMeasure& fiber, const std::vector<double>& radii, int words) {
  if (fiber.size() == 0) throw InvalidArgument("holder_profile: empty fiber");
  HolderProfile out;
  out.radii = radii;
  out.floor = words > 0 ? 1.0 / std::sqrt(static_cast<double>(words)) : 0.0;
  const double total = fiber.total();

  // Sorted atoms, repeated at -pi and +pi so windows never need wrapping.
  std::vector<std::size_t> order(fiber.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return fiber.angles[a] < fiber.angles[b] || (fiber.angles[a] == fiber.angles[b] && a < b);
  });
  const std::size_t m = order.size();
  std::vector<double> ext(3 * m);
  std::vector<double> prefix(3 * m + 1, 0.0);
  for (int copy = 0; copy < 3; ++copy) {
    for (std::size_t i = 0; i < m; ++i) {
      ext[copy * m + i] = fiber.angles[order[i]] + (copy - 1) * kPi;
      prefix[copy * m + i + 1] = prefix[copy * m + i] + fiber.weights[order[i]];
    }
  }
  for (double r : radii) {
    if (!(r > 0.0)) throw InvalidArgument("holder_profile: radii must be positive");
    double best = 0.0;
    if (r >= 0.5 * kPi) {
      best = total;
    } else {
      for (std::size_t i = 0; i < m; ++i) {
        const double a = ext[m + i];
        const auto lo = std::lower_bound(ext.begin(), ext.end(), a - r) - ext.begin();
        const auto hi = std::upper_bound(ext.begin(), ext.end(), a + r) - ext.begin();
        best = std::max(best, prefix[hi] - prefix[lo]);
      }
    }
    out.mass.push_back(best / total);
  }

  std::vector<double> fx;
  std::vector<double> fy;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (out.mass[i] <= out.floor) out.floor_radius = std::max(out.floor_radius, radii[i]);
  }
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (radii[i] > out.floor_radius && out.mass[i] > out.floor && out.mass[i] < 1.0 - 1e-12) {
      fx.push_back(radii[i]);
      fy.push_back(out.mass[i]);
    }
  }
  const bool distinct = fx.size() >= 2 && *std::min_element(fx.begin(), fx.end()) < *std::max_element(fx.begin(), fx.end());
  if (distinct) {
    out.fit = loglog_fit(fx, fy);
    out.alpha = out.fit.slope;
  }
  out.degenerate = !distinct || std::fabs(out.alpha) < 1e-9;
  if (out.degenerate) out.alpha = 0.0;
  return out;
}

HolderFieldFit fit_unstable_holder(const GeneratorLaw& law, const DirectionContext& ctx, int pairs, int n_trunc,
                                   std::uint64_t seed) {
  if (pairs < 2) throw InvalidArgument("fit_unstable_holder: need at least two pairs");
  std::vector<double> dist(static_cast<std::size_t>(pairs));
  std::vector<double> ang(dist.size());
  parallel_for(dist.size(), [&](unsigned, std::size_t k) {
    CounterRng rng(derive_seed(seed, k));
    const Word w = sample_word(law, static_cast<std::size_t>(n_trunc), rng());
    const TorusPoint x(rng.uniform(), rng.uniform());
    const double d = std::pow(10.0, -1.0 - 3.0 * rng.uniform());
    const double phi = kTwoPi * rng.uniform();
    const TorusPoint y(x.x + d * std::cos(phi), x.y + d * std::sin(phi));
    dist[k] = d;
    ang[k] = angle(unstable_direction(law, ctx, w, x, n_trunc).line, unstable_direction(law, ctx, w, y, n_trunc).line);
  });
  HolderFieldFit out;
  std::vector<double> fx;
  std::vector<double> fy;
  for (std::size_t k = 0; k < dist.size(); ++k) {
    if (ang[k] > 1e-13) {
      fx.push_back(dist[k]);
      fy.push_back(ang[k]);
    }
  }
  if (fx.size() < dist.size() / 2 || fx.size() < 2) {
    // The field is constant up to rounding (linear laws).
    out.constant_field = true;
    return out;
  }
  out.fit = loglog_fit(fx, fy);
  out.theta = std::clamp(out.fit.slope, 0.05, 1.0);
  for (std::size_t k = 0; k < fx.size(); ++k) out.l0 = std::max(out.l0, fy[k] / std::pow(fx[k], out.theta));
  return out;
}

TransversalityContext TransversalityContext::from(const ConeSystem& cones, const CertReport& cert,
                                                  const HolderFieldFit& holder) {
  TransversalityContext c;
  c.cone_u = cones.cone_u;
  c.c4 = cert.c4;
  c.l0 = holder.l0;
  c.theta = holder.theta;
  c.c10 = std::max(2.0 * c.c4, c.l0);
  c.lambda = std::max(std::pow(cert.lambda_s_minus, c.theta), cert.lambda_s_plus / cert.lambda_u_minus);
  return c;
}

double TransversalityContext::threshold(int n, double delta) const {
  return 5.0 * c10 * std::pow(lambda, n) * std::exp(delta * n);
}

TransversalityOutcome transversality_test(const GeneratorLaw& law, const TransversalityContext& ctx,
                                          const TorusPoint& p, int n, double delta, const Word& word1,
                                          const Word& word2) {
  if (n < 0 || word1.size() != static_cast<std::size_t>(n) || word2.size() != static_cast<std::size_t>(n)) {
    throw InvalidArgument("transversality_test: words must have n letters");
  }
  const Word* words[2] = {&word1, &word2};
  Vec2 lines[2][3];
  for (int i = 0; i < 2; ++i) {
    const std::vector<TorusPoint> orbit = backward_orbit(law, *words[i], p);
    const double s[3] = {0.0, 0.5, 1.0};
    for (int j = 0; j < 3; ++j) lines[i][j] = push_line(law, *words[i], orbit, ctx.cone_u.direction(s[j]));
  }
  TransversalityOutcome out;
  out.threshold = ctx.threshold(n, delta);
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) out.max_angle = std::max(out.max_angle, angle(lines[0][a], lines[1][b]));
  }
  out.nontransverse = out.max_angle <= out.threshold;
  return out;
}

TransversalityRecord nontransverse_mass(const GeneratorLaw& law, const TransversalityContext& ctx,
                                        const TorusPoint& p, int n, double delta, int trials, std::uint64_t seed) {
  law.validate();
  if (trials < 1) throw InvalidArgument("nontransverse_mass: trials must be >= 1");
  TransversalityRecord rec;
  rec.p = p;
  rec.n = n;
  rec.delta = delta;
  rec.threshold = ctx.threshold(n, delta);
  rec.pairs_tested = trials;
  rec.vacuous = rec.threshold >= 0.5 * kPi;
  rec.degenerate = single_generator(law);
  const Word reference = sample_word(law, static_cast<std::size_t>(n), derive_seed(seed, 0));
  std::vector<char> hit(static_cast<std::size_t>(trials), 0);
  parallel_for(hit.size(), [&](unsigned, std::size_t t) {
    const Word w = sample_word(law, static_cast<std::size_t>(n), derive_seed(seed, t + 1));
    hit[t] = transversality_test(law, ctx, p, n, delta, reference, w).nontransverse ? 1 : 0;
  });
  rec.nontransverse_fraction = static_cast<double>(std::count(hit.begin(), hit.end(), 1)) / trials;
  return rec;
}

std::string fiber_csv(const FiberMeasure& fiber) {
  std::ostringstream os;
  os << "angle,weight\n";
  for (std::size_t i = 0; i < fiber.size(); ++i) os << fmt(fiber.angles[i]) << ',' << fmt(fiber.weights[i]) << '\n';
  return os.str();
}

std::string profile_csv(const HolderProfile& profile) {
  std::ostringstream os;
  os << "r,mass,slope\n";
  for (std::size_t i = 0; i < profile.radii.size(); ++i) {
    os << fmt(profile.radii[i]) << ',' << fmt(profile.mass[i]) << ',' << fmt(profile.alpha) << '\n';
  }
  return os.str();
}

}  // namespace torus_lab
