#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "torus_lab/torus.hpp"

namespace torus_lab {

/// Uniform-cell bucket index over points of the torus (CSR layout).
/// Queries visit the cells overlapping the ball with wraparound.
class SpatialIndex {
 public:
  SpatialIndex() = default;
  /// cells_per_axis >= 1; points are referenced by position in `points`.
  SpatialIndex(const std::vector<TorusPoint>& points, int cells_per_axis);

  /// Calls fn(index, displacement from z) for every point with d(z, p) < r.
  template <class Fn>
  void for_each_within(const TorusPoint& z, double r, Fn&& fn) const;

  int cells_per_axis() const { return cells_; }
  const std::vector<std::uint32_t>& order() const { return order_; }

  /// Cell count for a typical query radius r and point count.
  static int suggest_cells(double r, std::size_t points);

 private:
  int cells_ = 1;
  std::vector<std::uint32_t> start_;  // size cells^2 + 1
  std::vector<std::uint32_t> order_;
  std::vector<TorusPoint> sorted_;    // points in order_ order
};

template <class Fn>
void SpatialIndex::for_each_within(const TorusPoint& z, double r, Fn&& fn) const {
  if (sorted_.empty()) return;
  const double r2 = r * r;
  const int span = static_cast<int>(std::ceil(r * cells_));
  const int cx = static_cast<int>(z.x * cells_);
  const int cy = static_cast<int>(z.y * cells_);
  const int nx = std::min(2 * span + 1, cells_);
  const int ny = std::min(2 * span + 1, cells_);
  const int x0 = nx == cells_ ? 0 : cx - span;
  const int y0 = ny == cells_ ? 0 : cy - span;
  for (int a = 0; a < nx; ++a) {
    const int i = ((x0 + a) % cells_ + cells_) % cells_;
    for (int b = 0; b < ny; ++b) {
      const int j = ((y0 + b) % cells_ + cells_) % cells_;
      const std::size_t c = static_cast<std::size_t>(i) * cells_ + j;
      for (std::uint32_t k = start_[c]; k < start_[c + 1]; ++k) {
        const Vec2 d = displacement(z, sorted_[k]);
        if (d.x * d.x + d.y * d.y < r2) fn(order_[k], d);
      }
    }
  }
}

}  // namespace torus_lab
