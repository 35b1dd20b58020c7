#include "torus_lab/torus_map.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "torus_lab/errors.hpp"

namespace torus_lab {
namespace {

constexpr int kMaxInverseIterations = 200;
constexpr double kInverseTolerance = 1e-10;

double mode_wavenumber(const FourierMode& m) { return kTwoPi * std::hypot(m.k[0], m.k[1]); }

}  // namespace

TorusMap::TorusMap(IntMat2 matrix, std::vector<FourierMode> modes, double epsilon, std::string name)
    : matrix_(matrix), a_(matrix.to_real()), modes_(std::move(modes)), epsilon_(epsilon), name_(std::move(name)) {
  const std::int64_t det = matrix_.det();
  if (det != 1 && det != -1) {
    std::ostringstream os;
    os << "matrix determinant must be +-1, got " << det;
    throw InvalidMap(os.str());
  }
  const double tr = static_cast<double>(matrix_.trace());
  const double disc = tr * tr - 4.0 * static_cast<double>(det);
  if (disc <= 0.0 || (det == 1 && std::fabs(tr) <= 2.0) || (det == -1 && tr == 0.0)) {
    throw InvalidMap("matrix is not hyperbolic (eigenvalues must be real and off the unit circle)");
  }
  if (!(epsilon_ >= 0.0) || !std::isfinite(epsilon_)) throw InvalidMap("epsilon must be finite and >= 0");
  a_inv_ = a_.inverse();
  for (const auto& m : modes_) {
    const double amp = norm(m.amplitude);
    const double w = mode_wavenumber(m);
    phi_lip_ += amp * w;
    phi_second_ += amp * w * w;
  }
  const double contraction = epsilon_ * phi_lip_ * operator_norm(a_inv_);
  if (contraction >= 1.0) {
    std::ostringstream os;
    os << "perturbation too large: eps * Lip(phi) * |A^-1| = " << contraction << " >= 1";
    throw InvalidMap(os.str());
  }
}

Vec2 TorusMap::lift(const Vec2& p) const {
  Vec2 out = a_ * p;
  if (is_linear()) return out;
  Vec2 phi;
  for (const auto& m : modes_) {
    const double s = std::sin(kTwoPi * (m.k[0] * p.x + m.k[1] * p.y) + m.phase);
    phi += s * m.amplitude;
  }
  return out + epsilon_ * phi;
}

Vec2 TorusMap::lift_difference(const Vec2& p, const Vec2& delta) const {
  Vec2 out = a_ * delta;
  if (is_linear()) return out;
  Vec2 dphi;
  for (const auto& m : modes_) {
    // sin(t + b) - sin(t) = 2 cos(t + b/2) sin(b/2)
    const double t = kTwoPi * (m.k[0] * p.x + m.k[1] * p.y) + m.phase;
    const double b = kTwoPi * (m.k[0] * delta.x + m.k[1] * delta.y);
    dphi += (2.0 * std::cos(t + 0.5 * b) * std::sin(0.5 * b)) * m.amplitude;
  }
  return out + epsilon_ * dphi;
}

Vec2 TorusMap::lift_inverse(const Vec2& q) const {
  Vec2 p = a_inv_ * q;
  if (is_linear()) return p;
  for (int it = 0; it < kMaxInverseIterations; ++it) {
    const Vec2 image = lift(p);
    const Vec2 residual = q - image;
    if (norm(residual) <= 1e-3 * kInverseTolerance) return p;
    const Vec2 next = a_inv_ * (q - (image - a_ * p));
    if (norm(next - p) == 0.0) return next;
    p = next;
  }
  if (norm(q - lift(p)) <= kInverseTolerance) return p;
  throw NonConvergence("inverse fixed-point iteration did not converge in 200 iterations");
}

TorusPoint TorusMap::inverse(const TorusPoint& q) const {
  // Any lift of q works: preimages of different lifts differ by A^-1 Z^2 = Z^2.
  return TorusPoint(lift_inverse(q.vec()));
}

Mat2 TorusMap::differential(const Vec2& p) const {
  if (is_linear()) return a_;
  Mat2 dphi;
  for (const auto& m : modes_) {
    const double c = kTwoPi * std::cos(kTwoPi * (m.k[0] * p.x + m.k[1] * p.y) + m.phase);
    dphi.a += m.amplitude.x * m.k[0] * c;
    dphi.b += m.amplitude.x * m.k[1] * c;
    dphi.c += m.amplitude.y * m.k[0] * c;
    dphi.d += m.amplitude.y * m.k[1] * c;
  }
  return a_ + epsilon_ * dphi;
}

Vec2 TorusMap::second_differential(const Vec2& p, const Vec2& v, const Vec2& w) const {
  if (is_linear()) return {};
  Vec2 out;
  for (const auto& m : modes_) {
    const double kv = m.k[0] * v.x + m.k[1] * v.y;
    const double kw = m.k[0] * w.x + m.k[1] * w.y;
    const double s = std::sin(kTwoPi * (m.k[0] * p.x + m.k[1] * p.y) + m.phase);
    out += (-kTwoPi * kTwoPi * kv * kw * s) * m.amplitude;
  }
  return epsilon_ * out;
}

Jet2 TorusMap::push_jet(const Jet2& j) const {
  const Mat2 df = differential(j.p);
  return {lift(j.p), df * j.d1, df * j.d2 + second_differential(j.p, j.d1, j.d1)};
}

double TorusMap::derivative_bound() const { return operator_norm(a_) + epsilon_ * phi_lip_; }

double TorusMap::inverse_derivative_bound() const {
  const double inv = operator_norm(a_inv_);
  return inv / (1.0 - epsilon_ * phi_lip_ * inv);
}

double TorusMap::c2_norm_bound() const {
  const double d1 = derivative_bound();
  const double d1_inv = inverse_derivative_bound();
  const double d2 = second_derivative_bound();
  // D^2(f^-1) = -Df^-1 D^2 f (Df^-1 ., Df^-1 .)
  const double d2_inv = d1_inv * d1_inv * d1_inv * d2;
  return std::fmax(std::fmax(d1, d1_inv), std::fmax(d2, d2_inv));
}

double TorusMap::max_abs_det() const {
  const double e = epsilon_ * phi_lip_;
  return 1.0 + 2.0 * e * operator_norm(a_inv_) + e * e;
}

double TorusMap::min_abs_det() const {
  const double e = epsilon_ * phi_lip_;
  return std::fmax(0.0, 1.0 - 2.0 * e * operator_norm(a_inv_) - e * e);
}

}  // namespace torus_lab
