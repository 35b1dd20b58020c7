#include "torus_lab/equidistribution.hpp"

#include <algorithm>
#include <sstream>

#include "torus_lab/errors.hpp"
#include "torus_lab/format.hpp"

namespace torus_lab {

EquidistRun equidistribution_run(const GeneratorLaw& law, const TorusPoint& x0, const std::vector<int>& checkpoints,
                                 int words, int resolution, const GridMeasure& reference, std::uint64_t seed) {
  law.validate();
  if (words < 1 || resolution < 1) throw InvalidArgument("equidistribution_run: words and resolution must be >= 1");
  if (checkpoints.empty()) throw InvalidArgument("equidistribution_run: no checkpoints");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 1 || (i > 0 && checkpoints[i] <= checkpoints[i - 1])) {
      throw InvalidArgument("equidistribution_run: checkpoints must be positive and increasing");
    }
  }
  EquidistRun run{x0, checkpoints, {}, resolution};
  auto start = [&](std::size_t, CounterRng&) { return x0; };
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    // Same seed for every checkpoint: the shorter run is a prefix of the longer one.
    const GridMeasure m =
        accumulate_orbits(law, static_cast<std::size_t>(words), start, 0, checkpoints[i] - 1, seed, reference.n)
            .to_measure();
    run.distances.push_back(coarse_distance(m, reference, resolution));
  }
  return run;
}

double min_cell_mass(const GridMeasure& m, int resolution) {
  const GridMeasure c = m.normalized().coarse(resolution);
  return *std::min_element(c.mass.begin(), c.mass.end());
}

std::string equidist_csv(const EquidistRun& run) {
  std::ostringstream os;
  os << "n,distance\n";
  for (std::size_t i = 0; i < run.checkpoints.size(); ++i) {
    os << run.checkpoints[i] << ',' << fmt(run.distances[i]) << '\n';
  }
  return os.str();
}

}  // namespace torus_lab
