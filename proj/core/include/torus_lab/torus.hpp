#pragma once

#include <cmath>

#include "torus_lab/linalg.hpp"

namespace torus_lab {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Reduce a real number to [0, 1).
inline double wrap_unit(double v) {
  double r = v - std::floor(v);
  // floor can round r up to exactly 1.0 for tiny negative v.
  return r >= 1.0 ? 0.0 : r;
}

/// Signed representative of v mod 1 in [-1/2, 1/2).
inline double wrap_centered(double v) { return v - std::floor(v + 0.5); }

/// Point of R^2/Z^2; coordinates always in [0, 1).
struct TorusPoint {
  double x = 0.0;
  double y = 0.0;

  TorusPoint() = default;
  TorusPoint(double x_in, double y_in) : x(wrap_unit(x_in)), y(wrap_unit(y_in)) {}
  explicit TorusPoint(const Vec2& lifted) : TorusPoint(lifted.x, lifted.y) {}

  Vec2 vec() const { return {x, y}; }
  friend bool operator==(const TorusPoint&, const TorusPoint&) = default;
};

/// Shortest displacement q - p over integer translates.
inline Vec2 displacement(const TorusPoint& p, const TorusPoint& q) {
  return {wrap_centered(q.x - p.x), wrap_centered(q.y - p.y)};
}

/// Flat-torus distance; injectivity radius 1/2.
inline double torus_distance(const TorusPoint& p, const TorusPoint& q) { return norm(displacement(p, q)); }

/// Lift of q nearest to the reference lift.
inline Vec2 lift_near(const TorusPoint& q, const Vec2& reference) {
  return {reference.x + wrap_centered(q.x - reference.x), reference.y + wrap_centered(q.y - reference.y)};
}

/// Vector in the global trivialization T T^2 = T^2 x R^2.
struct TangentVector {
  TorusPoint base;
  Vec2 v;
};

}  // namespace torus_lab
