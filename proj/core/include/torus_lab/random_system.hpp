#pragma once

#include <cstdint>
#include <vector>

#include "torus_lab/certify.hpp"
#include "torus_lab/cone.hpp"
#include "torus_lab/rng.hpp"
#include "torus_lab/torus_map.hpp"

namespace torus_lab {

/// Finitely supported law mu = sum_i weights[i] * delta_{maps[i]}.
struct GeneratorLaw {
  std::vector<TorusMap> maps;
  std::vector<double> weights;

  /// Throws InvalidArgument unless sizes match, weights are >= 0, at least
  /// one is positive and they sum to 1 within 1e-12.
  void validate() const;
  std::size_t size() const { return maps.size(); }
  /// Index drawn from the weights with a single uniform variate.
  int sample_index(double u) const;
  /// Law with a single map and weight 1.
  static GeneratorLaw single(const TorusMap& f);
  /// Convex combination w * f + (1 - w) * g.
  static GeneratorLaw pair(const TorusMap& f, const TorusMap& g, double w = 0.5);
};

/// Letters in the order they are applied: indices[0] acts first.
struct Word {
  std::vector<int> indices;
  std::uint64_t seed = 0;

  std::size_t size() const { return indices.size(); }
};

/// IID word of length n; deterministic in (law, n, seed).
Word sample_word(const GeneratorLaw& law, std::size_t n, std::uint64_t seed);

/// f_{w[n-1]} o ... o f_{w[0]} (p).
TorusPoint compose_apply(const GeneratorLaw& law, const Word& word, const TorusPoint& p);
/// Chain-rule product Df^n_w(p), always in factored form.
FactoredMatrix compose_differential(const GeneratorLaw& law, const Word& word, const TorusPoint& p);

/// Cone data and certified constants used to bound direction errors.
struct DirectionContext {
  Cone cone_u;
  Cone cone_s;
  double c4 = 0.0;
  double rate = 0.0;  // lambda_{s,+} / lambda_{u,-}

  static DirectionContext from(const ConeSystem& cones, const CertReport& cert);
};

struct LineEstimate {
  Vec2 line;            // unit vector
  double error_bound;   // projective distance to the true direction
};

/// E^u at x for the past whose last n_trunc letters are the tail of
/// past_word (the last letter is the map applied just before reaching x).
LineEstimate unstable_direction(const GeneratorLaw& law, const DirectionContext& ctx, const Word& past_word,
                                const TorusPoint& x, int n_trunc);
/// E^s at x for the future given by the first n_trunc letters.
LineEstimate stable_direction(const GeneratorLaw& law, const DirectionContext& ctx, const Word& future_word,
                              const TorusPoint& x, int n_trunc);

/// (1/n) log(|Df^n|_F| * |Df^n|_E|) with F the unstable estimate from
/// past_word and E the stable direction of future_word at x. future_word
/// must have at least n + n_trunc letters; |Df^n|_E| is obtained by pulling
/// back along the orbit so the contracting factor is never swamped.
double determinant_product_check(const GeneratorLaw& law, const DirectionContext& ctx, const Word& past_word,
                                 const Word& future_word, const TorusPoint& x, int n, int n_trunc);

/// Exact mu^N-average of log|Df^N_w(x) v| minimized over directions at
/// space_grid^2 cell centers: dir_grid angles plus every short word's most
/// contracted direction, each local minimum refined by golden-section
/// search. Throws EnumerationTooLarge if |maps|^N > 1e6.
double uniform_expansion_margin(const GeneratorLaw& law, int n, int space_grid, int dir_grid);
/// Margins for N = 1..n_max (entry N-1 is the margin at N).
std::vector<double> uniform_expansion_margins(const GeneratorLaw& law, int n_max, int space_grid, int dir_grid);
/// Smallest N <= n_max with a positive margin, or 0. Margins up to that N
/// are stored in `margins` when given.
int first_expanding_depth(const GeneratorLaw& law, int n_max, int space_grid, int dir_grid,
                          std::vector<double>* margins = nullptr);

}  // namespace torus_lab
