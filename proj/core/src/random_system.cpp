#include "torus_lab/random_system.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "torus_lab/errors.hpp"
#include "torus_lab/parallel.hpp"

namespace torus_lab {

void GeneratorLaw::validate() const {
  if (maps.empty()) throw InvalidArgument("law needs at least one map");
  if (weights.size() != maps.size()) throw InvalidArgument("law: weights and maps differ in length");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw InvalidArgument("law: weights must be >= 0");
    sum += w;
  }
  if (std::fabs(sum - 1.0) > 1e-12) throw InvalidArgument("law: weights must sum to 1");
}

int GeneratorLaw::sample_index(double u) const {
  double acc = 0.0;
  int last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last_positive = static_cast<int>(i);
    if (u < acc) return last_positive;
  }
  return last_positive;
}

GeneratorLaw GeneratorLaw::single(const TorusMap& f) { return {{f}, {1.0}}; }

GeneratorLaw GeneratorLaw::pair(const TorusMap& f, const TorusMap& g, double w) { return {{f, g}, {w, 1.0 - w}}; }

Word sample_word(const GeneratorLaw& law, std::size_t n, std::uint64_t seed) {
  Word w;
  w.seed = seed;
  w.indices.resize(n);
  CounterRng rng(seed);
  for (auto& idx : w.indices) idx = law.sample_index(rng.uniform());
  return w;
}

TorusPoint compose_apply(const GeneratorLaw& law, const Word& word, const TorusPoint& p) {
  TorusPoint q = p;
  for (int idx : word.indices) q = law.maps[idx].apply(q);
  return q;
}

FactoredMatrix compose_differential(const GeneratorLaw& law, const Word& word, const TorusPoint& p) {
  FactoredMatrix m;
  TorusPoint q = p;
  for (int idx : word.indices) {
    const TorusMap& f = law.maps[idx];
    m.left_multiply(f.differential(q));
    q = f.apply(q);
  }
  return m;
}

DirectionContext DirectionContext::from(const ConeSystem& cones, const CertReport& cert) {
  return {cones.cone_u, cones.cone_s, cert.c4, cert.contraction_rate()};
}

LineEstimate unstable_direction(const GeneratorLaw& law, const DirectionContext& ctx, const Word& past_word,
                                const TorusPoint& x, int n_trunc) {
  if (n_trunc < 0 || static_cast<std::size_t>(n_trunc) > past_word.size()) {
    throw InvalidArgument("unstable_direction: past word shorter than n_trunc");
  }
  const std::size_t len = past_word.size();
  std::vector<Vec2> orbit(static_cast<std::size_t>(n_trunc));
  TorusPoint p = x;
  for (int k = 0; k < n_trunc; ++k) {
    const int idx = past_word.indices[len - 1 - k];
    p = law.maps[idx].inverse(p);
    orbit[k] = p.vec();
  }
  Vec2 v = ctx.cone_u.direction(0.5);
  for (int k = n_trunc - 1; k >= 0; --k) {
    const int idx = past_word.indices[len - 1 - k];
    v = normalized(law.maps[idx].differential(orbit[k]) * v);
  }
  return {v, ctx.c4 * std::pow(ctx.rate, n_trunc)};
}

LineEstimate stable_direction(const GeneratorLaw& law, const DirectionContext& ctx, const Word& future_word,
                              const TorusPoint& x, int n_trunc) {
  if (n_trunc < 0 || static_cast<std::size_t>(n_trunc) > future_word.size()) {
    throw InvalidArgument("stable_direction: future word shorter than n_trunc");
  }
  std::vector<Vec2> orbit(static_cast<std::size_t>(n_trunc));
  TorusPoint p = x;
  for (int k = 0; k < n_trunc; ++k) {
    orbit[k] = p.vec();
    p = law.maps[future_word.indices[k]].apply(p);
  }
  Vec2 v = ctx.cone_s.direction(0.5);
  for (int k = n_trunc - 1; k >= 0; --k) {
    v = normalized(law.maps[future_word.indices[k]].differential(orbit[k]).inverse() * v);
  }
  return {v, ctx.c4 * std::pow(ctx.rate, n_trunc)};
}

double determinant_product_check(const GeneratorLaw& law, const DirectionContext& ctx, const Word& past_word,
                                 const Word& future_word, const TorusPoint& x, int n, int n_trunc) {
  if (n < 1) throw InvalidArgument("determinant_product_check: n must be >= 1");
  if (future_word.size() < static_cast<std::size_t>(n + n_trunc)) {
    throw InvalidArgument("determinant_product_check: future word shorter than n + n_trunc");
  }
  const LineEstimate f_line = unstable_direction(law, ctx, past_word, x, n_trunc);

  const std::size_t total = static_cast<std::size_t>(n + n_trunc);
  std::vector<Vec2> orbit(total);
  TorusPoint p = x;
  for (std::size_t k = 0; k < total; ++k) {
    orbit[k] = p.vec();
    p = law.maps[future_word.indices[k]].apply(p);
  }
  // Forward along F: expansion is numerically stable.
  double log_f = 0.0;
  Vec2 v = f_line.line;
  for (int k = 0; k < n; ++k) {
    const Vec2 w = law.maps[future_word.indices[k]].differential(orbit[k]) * v;
    const double s = norm(w);
    log_f += std::log(s);
    v = w / s;
  }
  // Backward along E: pull a stable-cone line from step n + n_trunc to n,
  // then measure |Df^-n| on it from step n down to 0.
  Vec2 e = ctx.cone_s.direction(0.5);
  for (std::size_t k = total; k-- > static_cast<std::size_t>(n);) {
    e = normalized(law.maps[future_word.indices[k]].differential(orbit[k]).inverse() * e);
  }
  double log_e_inv = 0.0;
  for (int k = n - 1; k >= 0; --k) {
    const Vec2 w = law.maps[future_word.indices[k]].differential(orbit[k]).inverse() * e;
    const double s = norm(w);
    log_e_inv += std::log(s);
    e = w / s;
  }
  return (log_f - log_e_inv) / n;
}

namespace {

// Word length used to seed the direction search.
constexpr int kSeededDepth = 6;

// Angle of the smallest right singular vector of Df^depth_w(x), every w.
std::vector<double> word_contracted_directions(const GeneratorLaw& law, const TorusPoint& x, int depth) {
  std::vector<double> out;
  struct Frame {
    TorusPoint p;
    Mat2 m;
    int depth;
  };
  std::vector<Frame> stack{{x, Mat2::identity(), 0}};
  while (!stack.empty()) {
    const Frame fr = stack.back();
    stack.pop_back();
    if (fr.depth == depth) {
      // M^T M = [[p, q], [q, r]]; eigenvector of the smaller eigenvalue.
      const double p = fr.m.a * fr.m.a + fr.m.c * fr.m.c;
      const double q = fr.m.a * fr.m.b + fr.m.c * fr.m.d;
      const double r = fr.m.b * fr.m.b + fr.m.d * fr.m.d;
      out.push_back(0.5 * std::atan2(2.0 * q, p - r) + 0.5 * kPi);
      continue;
    }
    for (std::size_t i = 0; i < law.size(); ++i) {
      if (law.weights[i] <= 0.0) continue;
      const TorusMap& f = law.maps[i];
      stack.push_back({f.apply(fr.p), f.differential(fr.p) * fr.m, fr.depth + 1});
    }
  }
  return out;
}

struct ExpansionDfs {
  const GeneratorLaw& law;
  int n_max;
  std::vector<double>& sums;  // sums[d-1] = E log|Df^d v|

  void visit(const TorusPoint& x, const Vec2& v, double log_norm, double prob, int depth) const {
    for (std::size_t i = 0; i < law.size(); ++i) {
      const double w = law.weights[i];
      if (w <= 0.0) continue;
      const TorusMap& f = law.maps[i];
      const Vec2 u = f.differential(x) * v;
      const double s = norm(u);
      const double ln = log_norm + std::log(s);
      const double pr = prob * w;
      sums[depth] += pr * ln;
      if (depth + 1 < n_max) visit(f.apply(x), u / s, ln, pr, depth + 1);
    }
  }
};

}  // namespace

namespace {

// min over directions of E log|Df^depth_w(x) v| at one base point.
double margin_at(const GeneratorLaw& law, const TorusPoint& x, int depth, int dir_grid) {
  auto eval = [&](double a) {
    std::vector<double> sums(static_cast<std::size_t>(depth), 0.0);
    ExpansionDfs{law, depth, sums}.visit(x, {std::cos(a), std::sin(a)}, 0.0, 1.0, 0);
    return sums.back();
  };
  // Each log|M v| is unimodal on the projective line with a dip that
  // narrows like the expansion squared, so the grid alone misses it.
  double best = std::numeric_limits<double>::infinity();
  auto refine = [&](double lo, double hi) {
    constexpr double kInvPhi = 0.6180339887498949;
    double a = hi - kInvPhi * (hi - lo);
    double b = lo + kInvPhi * (hi - lo);
    double fa = eval(a);
    double fb = eval(b);
    for (int it = 0; it < 90; ++it) {
      if (fa <= fb) {
        hi = b;
        b = a;
        fb = fa;
        a = hi - kInvPhi * (hi - lo);
        fa = eval(a);
      } else {
        lo = a;
        a = b;
        fa = fb;
        b = lo + kInvPhi * (hi - lo);
        fb = eval(b);
      }
    }
    best = std::min({best, fa, fb});
  };
  const double h = kPi / dir_grid;
  std::vector<double> grid(static_cast<std::size_t>(dir_grid));
  for (int d = 0; d < dir_grid; ++d) grid[d] = eval(h * d);
  for (int d = 0; d < dir_grid; ++d) {
    best = std::min(best, grid[d]);
    if (grid[d] <= grid[(d + dir_grid - 1) % dir_grid] && grid[d] <= grid[(d + 1) % dir_grid]) {
      refine(h * (d - 1), h * (d + 1));
    }
  }
  // Also start at every word's most contracted direction; longer words are
  // seeded by their first kSeededDepth letters, which fix that direction up
  // to the projective contraction.
  for (double a : word_contracted_directions(law, x, std::min(depth, kSeededDepth))) {
    best = std::min(best, eval(a));
    refine(a - h, a + h);
  }
  return best;
}

void check_expansion_args(const GeneratorLaw& law, int n_max, int space_grid, int dir_grid) {
  law.validate();
  if (n_max < 1) throw InvalidArgument("uniform expansion: N must be >= 1");
  if (space_grid < 1 || dir_grid < 3) throw InvalidArgument("uniform expansion: need space_grid >= 1, dir_grid >= 3");
  std::size_t active = 0;
  for (double w : law.weights) active += w > 0.0 ? 1 : 0;
  if (std::pow(static_cast<double>(active), n_max) > 1e6) {
    throw EnumerationTooLarge("uniform expansion: |maps|^N exceeds 1e6 words");
  }
}

}  // namespace

double uniform_expansion_margin(const GeneratorLaw& law, int n, int space_grid, int dir_grid) {
  check_expansion_args(law, n, space_grid, dir_grid);
  const std::size_t cells = static_cast<std::size_t>(space_grid) * space_grid;
  std::vector<double> per_cell(cells);
  parallel_for(cells, [&](unsigned, std::size_t cell) {
    const TorusPoint x((static_cast<double>(cell / space_grid) + 0.5) / space_grid,
                       (static_cast<double>(cell % space_grid) + 0.5) / space_grid);
    per_cell[cell] = margin_at(law, x, n, dir_grid);
  });
  return *std::min_element(per_cell.begin(), per_cell.end());
}

std::vector<double> uniform_expansion_margins(const GeneratorLaw& law, int n_max, int space_grid, int dir_grid) {
  check_expansion_args(law, n_max, space_grid, dir_grid);
  std::vector<double> margins;
  for (int n = 1; n <= n_max; ++n) margins.push_back(uniform_expansion_margin(law, n, space_grid, dir_grid));
  return margins;
}

int first_expanding_depth(const GeneratorLaw& law, int n_max, int space_grid, int dir_grid,
                          std::vector<double>* margins) {
  check_expansion_args(law, n_max, space_grid, dir_grid);
  if (margins) margins->clear();
  for (int n = 1; n <= n_max; ++n) {
    const double m = uniform_expansion_margin(law, n, space_grid, dir_grid);
    if (margins) margins->push_back(m);
    if (m > 0.0) return n;
  }
  return 0;
}

}  // namespace torus_lab
