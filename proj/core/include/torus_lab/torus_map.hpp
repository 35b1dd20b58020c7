#pragma once

#include <array>
#include <string>
#include <vector>

#include "torus_lab/linalg.hpp"
#include "torus_lab/torus.hpp"

namespace torus_lab {

/// One term a * sin(2 pi k.x + phase) of the perturbation.
struct FourierMode {
  std::array<int, 2> k{0, 0};
  Vec2 amplitude;
  double phase = 0.0;
};

/// 2-jet (gamma(t), gamma'(t), gamma''(t)) of a C^2 curve. The position is
/// kept as a lift in R^2 so curves never tear across the fundamental domain.
struct Jet2 {
  Vec2 p;
  Vec2 d1;
  Vec2 d2;

  TorusPoint point() const { return TorusPoint(p); }
};

/// Signed curvature det(d1, d2) / |d1|^3.
inline double curvature(const Jet2& j) {
  const double s = norm(j.d1);
  return cross(j.d1, j.d2) / (s * s * s);
}

/// x -> A x + eps * phi(x) (mod 1) with phi a trigonometric polynomial.
///
/// The lift F(x) = A x + eps * phi(x) on R^2 commutes with integer
/// translations up to A, so everything is evaluated on lifts and reduced
/// only when a TorusPoint is requested.
class TorusMap {
 public:
  /// Throws InvalidMap unless |det A| = 1, A is hyperbolic, eps >= 0 and
  /// eps * sup|D phi| * |A^-1| < 1 (which makes the map a diffeomorphism
  /// and the inverse iteration a contraction).
  explicit TorusMap(IntMat2 matrix, std::vector<FourierMode> modes = {}, double epsilon = 0.0,
                    std::string name = {});

  const IntMat2& matrix() const { return matrix_; }
  const std::vector<FourierMode>& modes() const { return modes_; }
  double epsilon() const { return epsilon_; }
  const std::string& name() const { return name_; }
  bool is_linear() const { return epsilon_ == 0.0 || modes_.empty(); }

  Vec2 lift(const Vec2& p) const;
  /// F(p + delta) - F(p) without cancellation, accurate for tiny delta.
  Vec2 lift_difference(const Vec2& p, const Vec2& delta) const;
  TorusPoint apply(const TorusPoint& p) const { return TorusPoint(lift(p.vec())); }

  /// Exact lift inverse: the p in R^2 with lift(p) = q.
  Vec2 lift_inverse(const Vec2& q) const;
  /// Fixed-point iteration p <- A^-1 (q - eps phi(p)); NonConvergence after
  /// 200 iterations without reaching d(apply(p), q) <= 1e-10.
  TorusPoint inverse(const TorusPoint& q) const;

  Mat2 differential(const Vec2& p) const;
  Mat2 differential(const TorusPoint& p) const { return differential(p.vec()); }
  /// D^2 f(p)(v, w); symmetric in v and w.
  Vec2 second_differential(const Vec2& p, const Vec2& v, const Vec2& w) const;

  /// (f(p), Df d1, Df d2 + D^2 f(d1, d1)).
  Jet2 push_jet(const Jet2& j) const;

  /// sup |D phi| over the torus (upper bound from the mode list).
  double perturbation_lipschitz() const { return phi_lip_; }
  /// sup |D^2 f| = eps * sup |D^2 phi| (upper bound).
  double second_derivative_bound() const { return epsilon_ * phi_second_; }
  /// sup |Df| and sup |Df^-1| (upper bounds).
  double derivative_bound() const;
  double inverse_derivative_bound() const;
  /// Bound on max(|f|_C2, |f^-1|_C2).
  double c2_norm_bound() const;
  /// Upper bound on |det Df|.
  double max_abs_det() const;
  double min_abs_det() const;

 private:
  IntMat2 matrix_;
  Mat2 a_;
  Mat2 a_inv_;
  std::vector<FourierMode> modes_;
  double epsilon_ = 0.0;
  std::string name_;
  double phi_lip_ = 0.0;
  double phi_second_ = 0.0;
};

}  // namespace torus_lab
