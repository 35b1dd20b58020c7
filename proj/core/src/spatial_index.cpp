#include "torus_lab/spatial_index.hpp"

#include <algorithm>
#include <cmath>

#include "torus_lab/errors.hpp"

namespace torus_lab {
namespace {

int cell_of(double v, int cells) { return std::min(cells - 1, static_cast<int>(v * cells)); }

}  // namespace

SpatialIndex::SpatialIndex(const std::vector<TorusPoint>& points, int cells_per_axis) : cells_(cells_per_axis) {
  if (cells_ < 1) throw InvalidArgument("spatial index needs at least one cell per axis");
  const std::size_t total_cells = static_cast<std::size_t>(cells_) * cells_;
  std::vector<std::uint32_t> cell(points.size());
  start_.assign(total_cells + 1, 0);
  for (std::size_t k = 0; k < points.size(); ++k) {
    cell[k] = static_cast<std::uint32_t>(cell_of(points[k].x, cells_) * cells_ + cell_of(points[k].y, cells_));
    ++start_[cell[k] + 1];
  }
  for (std::size_t c = 0; c < total_cells; ++c) start_[c + 1] += start_[c];
  order_.resize(points.size());
  sorted_.resize(points.size());
  std::vector<std::uint32_t> fill(start_.begin(), start_.end() - 1);
  for (std::size_t k = 0; k < points.size(); ++k) {
    const std::uint32_t slot = fill[cell[k]]++;
    order_[slot] = static_cast<std::uint32_t>(k);
    sorted_[slot] = points[k];
  }
}

int SpatialIndex::suggest_cells(double r, std::size_t points) {
  // Cells about the query radius, but not far more cells than points.
  const int by_radius = static_cast<int>(std::floor(1.0 / std::max(r, 1e-6)));
  const int by_count = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(std::max<std::size_t>(points, 1)))));
  return std::clamp(std::min(by_radius, by_count), 1, 4096);
}

}  // namespace torus_lab
