#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace torus_lab {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2& operator-=(const Vec2& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr Vec2& operator*=(double s) {
    x *= s;
    y *= s;
    return *this;
  }
  friend constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
  friend constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
  friend constexpr Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
  friend constexpr Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
  friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }
inline Vec2 normalized(const Vec2& a) { return a / norm(a); }

/// Row-major 2x2 matrix [[a, b], [c, d]].
struct Mat2 {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;

  static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

  constexpr Vec2 operator*(const Vec2& v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
  constexpr Mat2 operator*(const Mat2& m) const {
    return {a * m.a + b * m.c, a * m.b + b * m.d, c * m.a + d * m.c, c * m.b + d * m.d};
  }
  constexpr Mat2 operator+(const Mat2& m) const { return {a + m.a, b + m.b, c + m.c, d + m.d}; }
  constexpr Mat2 operator-(const Mat2& m) const { return {a - m.a, b - m.b, c - m.c, d - m.d}; }
  friend constexpr Mat2 operator*(double s, const Mat2& m) { return {s * m.a, s * m.b, s * m.c, s * m.d}; }
  friend constexpr bool operator==(const Mat2&, const Mat2&) = default;

  constexpr double det() const { return a * d - b * c; }
  constexpr double trace() const { return a + d; }
  constexpr Mat2 transpose() const { return {a, c, b, d}; }
  constexpr Mat2 inverse() const {
    const double inv = 1.0 / det();
    return {d * inv, -b * inv, -c * inv, a * inv};
  }
  constexpr Vec2 column(int j) const { return j == 0 ? Vec2{a, c} : Vec2{b, d}; }
  double max_abs() const { return std::fmax(std::fmax(std::fabs(a), std::fabs(b)), std::fmax(std::fabs(c), std::fabs(d))); }
};

/// Largest singular value.
inline double operator_norm(const Mat2& m) {
  const double s = m.a * m.a + m.b * m.b + m.c * m.c + m.d * m.d;
  const double dt = m.det();
  const double disc = std::sqrt(std::fmax(0.0, s * s / 4.0 - dt * dt));
  return std::sqrt(s / 2.0 + disc);
}

/// Smallest singular value.
inline double min_singular_value(const Mat2& m) {
  const double big = operator_norm(m);
  return big == 0.0 ? 0.0 : std::fabs(m.det()) / big;
}

/// Integer 2x2 matrix; entries of hyperbolic toral automorphisms.
struct IntMat2 {
  std::int64_t a = 0;
  std::int64_t b = 0;
  std::int64_t c = 0;
  std::int64_t d = 0;

  constexpr std::int64_t det() const { return a * d - b * c; }
  constexpr std::int64_t trace() const { return a + d; }
  constexpr IntMat2 operator*(const IntMat2& m) const {
    return {a * m.a + b * m.c, a * m.b + b * m.d, c * m.a + d * m.c, c * m.b + d * m.d};
  }
  constexpr Mat2 to_real() const {
    return {static_cast<double>(a), static_cast<double>(b), static_cast<double>(c), static_cast<double>(d)};
  }
  friend constexpr bool operator==(const IntMat2&, const IntMat2&) = default;
};

/// Product of 2x2 matrices kept as Q * R with Q orthogonal and
/// R = exp(log_r11) * [[1, t], [0, exp(log_r22 - log_r11)]].
/// Stays finite for arbitrarily long products.
class FactoredMatrix {
 public:
  FactoredMatrix() = default;
  explicit FactoredMatrix(const Mat2& m) { left_multiply(m); }

  /// this <- m * this
  void left_multiply(const Mat2& m);

  /// Dense value; may overflow for very long products.
  Mat2 matrix() const;
  double log_abs_det() const { return log_r11_ + log_r22_; }
  double log_norm() const;
  /// log ||M v|| for a nonzero v.
  double log_norm_on(const Vec2& v) const;
  /// Direction of M v (unit vector), computed without overflow.
  Vec2 direction_of(const Vec2& v) const;

  const Mat2& q() const { return q_; }
  double log_r11() const { return log_r11_; }
  double log_r22() const { return log_r22_; }
  double t() const { return t_; }

 private:
  Mat2 q_ = Mat2::identity();
  double log_r11_ = 0.0;
  double log_r22_ = 0.0;
  double t_ = 0.0;
  double det_sign_ = 1.0;
};

inline void FactoredMatrix::left_multiply(const Mat2& m) {
  // m * Q = Q' * R' (Givens on the first column), then R <- R' * R.
  const Mat2 mq = m * q_;
  const double r = std::hypot(mq.a, mq.c);
  const double cs = r > 0.0 ? mq.a / r : 1.0;
  const double sn = r > 0.0 ? mq.c / r : 0.0;
  // Q' = [[cs, -sn], [sn, cs]]; R' = Q'^T * mq.
  const double r12 = cs * mq.b + sn * mq.d;
  const double r22 = -sn * mq.b + cs * mq.d;
  q_ = {cs, -sn, sn, cs};
  // New R = R' * R with R' = [[r, r12], [0, r22]].
  const double ratio = std::exp(log_r22_ - log_r11_);
  t_ = t_ + (r12 / r) * ratio;
  log_r11_ += std::log(r);
  log_r22_ += std::log(std::fabs(r22));
  if (r22 < 0.0) {
    // Keep R's diagonal positive by flipping the second column of Q.
    q_.b = -q_.b;
    q_.d = -q_.d;
  }
  det_sign_ = (m.det() < 0.0) ? -det_sign_ : det_sign_;
}

inline Mat2 FactoredMatrix::matrix() const {
  const double r11 = std::exp(log_r11_);
  const Mat2 r{r11, r11 * t_, 0.0, std::exp(log_r22_)};
  return q_ * r;
}

inline double FactoredMatrix::log_norm() const {
  const double ratio = std::exp(log_r22_ - log_r11_);
  return log_r11_ + std::log(operator_norm(Mat2{1.0, t_, 0.0, ratio}));
}

inline double FactoredMatrix::log_norm_on(const Vec2& v) const {
  const double ratio = std::exp(log_r22_ - log_r11_);
  const Vec2 w{v.x + t_ * v.y, ratio * v.y};
  return log_r11_ + std::log(norm(w));
}

inline Vec2 FactoredMatrix::direction_of(const Vec2& v) const {
  const double ratio = std::exp(log_r22_ - log_r11_);
  const Vec2 w{v.x + t_ * v.y, ratio * v.y};
  return normalized(q_ * w);
}

}  // namespace torus_lab
