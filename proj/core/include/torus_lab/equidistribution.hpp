#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "torus_lab/measure.hpp"

namespace torus_lab {

struct EquidistRun {
  TorusPoint x0;
  std::vector<int> checkpoints;
  std::vector<double> distances;  // coarse TV to the reference
  int resolution = 0;
};

/// For each checkpoint n, the Cesaro average (1/n) sum_{j<n} mu^{*j} * delta_x0
/// estimated from `words` orbits, compared with the reference at the given
/// coarse resolution. Checkpoints must be increasing and positive; the
/// reference grid must be divisible into `resolution` cells per axis.
EquidistRun equidistribution_run(const GeneratorLaw& law, const TorusPoint& x0, const std::vector<int>& checkpoints,
                                 int words, int resolution, const GridMeasure& reference, std::uint64_t seed);

/// Smallest coarse-cell mass of the normalized measure at `resolution`.
double min_cell_mass(const GridMeasure& m, int resolution);

std::string equidist_csv(const EquidistRun& run);

}  // namespace torus_lab
