#include "torus_lab/cone.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "torus_lab/errors.hpp"
#include "torus_lab/torus.hpp"

namespace torus_lab {
namespace {

double wrap_pi(double a) {
  double r = std::fmod(a, kPi);
  if (r < 0.0) r += kPi;
  return r >= kPi ? 0.0 : r;
}

// Eigenvalues of a symmetric 2x2 matrix.
void sym_eigen(const Mat2& m, double& lo, double& hi) {
  const double mean = 0.5 * (m.a + m.d);
  const double r = std::hypot(0.5 * (m.a - m.d), m.b);
  lo = mean - r;
  hi = mean + r;
}

}  // namespace

double line_angle(const Vec2& v) {
  if (!(v.x != 0.0 || v.y != 0.0) || !std::isfinite(v.x) || !std::isfinite(v.y)) {
    throw ZeroVector("line spanned by a zero or non-finite vector");
  }
  return wrap_pi(std::atan2(v.y, v.x));
}

Vec2 line_vector(double angle) { return {std::cos(angle), std::sin(angle)}; }

double angle_distance(double a, double b) {
  const double d = wrap_pi(a - b);
  return std::min(d, kPi - d);
}

double angle(const Vec2& u, const Vec2& v) { return angle_distance(line_angle(u), line_angle(v)); }

double slope_angle(double slope) {
  if (std::isinf(slope)) return kPi / 2.0;
  return wrap_pi(std::atan(slope));
}

Cone Cone::from_slopes(double from, double to) {
  Cone c;
  c.lo = slope_angle(from);
  c.width = wrap_pi(slope_angle(to) - c.lo);
  return c;
}

double Cone::offset(double line) const { return wrap_pi(line - lo); }

bool Cone::contains(double line, double tolerance) const {
  const double off = offset(line);
  if (off <= width + tolerance) return true;
  // Just below lo wraps to an offset near pi.
  return kPi - off <= tolerance;
}

double Cone::at(double s) const { return wrap_pi(lo + s * width); }

double cone_gap(const Cone& a, const Cone& b) {
  const double g1 = wrap_pi(b.lo - a.hi());
  const double g2 = wrap_pi(a.lo - b.hi());
  if (a.offset(b.lo) < a.width || b.offset(a.lo) < b.width) return 0.0;
  return std::min({g1, g2, kPi / 2.0});
}

void ConeSystem::validate() const {
  for (const Cone* c : {&cone_s, &cone_u}) {
    if (!(c->width > 0.0) || !(c->width < kPi)) throw InvalidCone("cone must have angular width in (0, pi)");
  }
  // Open arcs overlap iff one starts strictly inside the other.
  const bool overlap = cone_u.offset(cone_s.lo) < cone_u.width && cone_u.offset(cone_s.lo) > 0.0;
  const bool overlap2 = cone_s.offset(cone_u.lo) < cone_s.width && cone_s.offset(cone_u.lo) > 0.0;
  const bool same_start = cone_s.lo == cone_u.lo;
  if (overlap || overlap2 || same_start) throw InvalidCone("stable and unstable cones overlap");
  for (const Mat2* q : {&metric_s, &metric_u}) {
    double lo = 0.0;
    double hi = 0.0;
    sym_eigen(*q, lo, hi);
    if (q->b != q->c || !(lo > 0.0)) throw InvalidCone("cone metric must be symmetric positive definite");
  }
}

double ConeSystem::metric_comparison() const {
  double worst = 1.0;
  for (const Mat2* q : {&metric_s, &metric_u}) {
    double lo = 0.0;
    double hi = 0.0;
    sym_eigen(*q, lo, hi);
    // |v|_q / |v| ranges over [sqrt(lo), sqrt(hi)].
    worst = std::max({worst, std::sqrt(hi), 1.0 / std::sqrt(lo)});
  }
  return std::sqrt(worst);
}

ConeSystem ConeSystem::standard() {
  ConeSystem cs;
  cs.cone_s = Cone::from_slopes(std::numeric_limits<double>::infinity(), 0.0);
  cs.cone_u = Cone::from_slopes(0.0, 1.0);
  return cs;
}

}  // namespace torus_lab
