#pragma once

#include <string>

#include "torus_lab/linalg.hpp"

namespace torus_lab {

/// Angle of the line through v, in [0, pi). Throws ZeroVector.
double line_angle(const Vec2& v);

/// Unit vector spanning the line at the given angle.
Vec2 line_vector(double angle);

/// Projective distance between two line angles (mod pi), in [0, pi/2].
double angle_distance(double a, double b);

/// Projective angle between the lines spanned by u and v, in [0, pi/2].
double angle(const Vec2& u, const Vec2& v);

/// Angle of the line with the given slope; +-inf gives the vertical line.
double slope_angle(double slope);

/// Open cone as an arc of RP^1: angles lo + s * width for s in (0, 1).
/// Symmetric under v -> -v by construction.
struct Cone {
  double lo = 0.0;
  double width = 0.0;

  /// Arc swept counterclockwise from the line of slope `from` to `to`.
  static Cone from_slopes(double from, double to);

  /// Offset of a line angle from lo, in [0, pi).
  double offset(double line) const;
  bool contains(double line, double tolerance = 0.0) const;
  bool contains(const Vec2& v, double tolerance = 0.0) const { return contains(line_angle(v), tolerance); }
  /// Line at fraction s of the arc (s = 0, 1 are the boundary rays).
  double at(double s) const;
  Vec2 direction(double s) const { return line_vector(at(s)); }
  double hi() const { return at(1.0); }
  double center() const { return at(0.5); }
};

/// Smallest projective angle between lines of two disjoint closed arcs.
double cone_gap(const Cone& a, const Cone& b);

/// ||v||_q = sqrt(v^T Q v).
inline double q_norm(const Mat2& q, const Vec2& v) { return std::sqrt(dot(v, q * v)); }

/// Constant cone fields and metrics in the global trivialization.
struct ConeSystem {
  Cone cone_s;
  Cone cone_u;
  Mat2 metric_s = Mat2::identity();
  Mat2 metric_u = Mat2::identity();

  /// Throws InvalidCone on zero width, overlapping open arcs or a
  /// metric that is not symmetric positive definite.
  void validate() const;

  /// C0'' = sqrt(max over both metrics of |.|_q/|.| and |.|/|.|_q).
  double metric_comparison() const;

  /// The cones {x<0<y or y<0<x}, {0<y<x or x<y<0} with identity metrics.
  static ConeSystem standard();
};

}  // namespace torus_lab
