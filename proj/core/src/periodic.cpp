#include "torus_lab/periodic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "torus_lab/errors.hpp"
#include "torus_lab/format.hpp"

namespace torus_lab {
namespace {

__extension__ typedef __int128 i128;

struct Power {
  i128 a, b, c, d;
};

Power power(const IntMat2& m, int n) {
  Power r{1, 0, 0, 1};
  for (int k = 0; k < n; ++k) {
    r = {r.a * m.a + r.b * m.c, r.a * m.b + r.b * m.d, r.c * m.a + r.d * m.c, r.c * m.b + r.d * m.d};
  }
  return r;
}

i128 abs128(i128 v) { return v < 0 ? -v : v; }

// Diagonalizes the rows x 2 matrix M by unimodular row and column
// operations; the column operations accumulate in w so that
// {x : M x in Z^rows} = w * ((1/d1) Z x (1/d2) Z).
void diagonalize(std::vector<std::array<i128, 2>> m, i128& d1, i128& d2, std::array<std::array<i128, 2>, 2>& w) {
  w[0][0] = 1;
  w[0][1] = 0;
  w[1][0] = 0;
  w[1][1] = 1;
  const std::size_t rows = m.size();
  auto col_swap = [&](int p, int q) {
    for (auto& r : m) std::swap(r[p], r[q]);
    for (auto& r : w) std::swap(r[p], r[q]);
  };
  auto col_sub = [&](int dst, int src, i128 q) {
    for (auto& r : m) r[dst] -= q * r[src];
    for (auto& r : w) r[dst] -= q * r[src];
  };
  for (int t = 0; t < 2; ++t) {
    while (true) {
      // Smallest nonzero pivot in the trailing block.
      std::size_t pi = rows;
      int pj = -1;
      for (std::size_t i = t; i < rows; ++i) {
        for (int j = t; j < 2; ++j) {
          if (m[i][j] != 0 && (pj < 0 || abs128(m[i][j]) < abs128(m[pi][pj]))) {
            pi = i;
            pj = j;
          }
        }
      }
      if (pj < 0) throw InvalidArgument("periodic points: A^n - I is singular (map not hyperbolic)");
      std::swap(m[t], m[pi]);
      if (pj != t) col_swap(t, pj);
      bool clean = true;
      for (std::size_t i = t + 1; i < rows; ++i) {
        const i128 q = m[i][t] / m[t][t];
        for (int j = 0; j < 2; ++j) m[i][j] -= q * m[t][j];
        clean = clean && m[i][t] == 0;
      }
      if (t == 0) {
        const i128 q = m[0][1] / m[0][0];
        col_sub(1, 0, q);
        clean = clean && m[0][1] == 0;
      }
      if (clean) break;
    }
  }
  d1 = abs128(m[0][0]);
  d2 = abs128(m[1][1]);
}

std::vector<TorusPoint> lattice_points(const std::vector<std::array<i128, 2>>& m, std::size_t limit) {
  i128 d1 = 0;
  i128 d2 = 0;
  std::array<std::array<i128, 2>, 2> w;
  diagonalize(m, d1, d2, w);
  if (d1 * d2 > static_cast<i128>(limit)) throw EnumerationTooLarge("periodic points: too many solutions");
  std::vector<TorusPoint> pts;
  for (i128 p = 0; p < d1; ++p) {
    for (i128 q = 0; q < d2; ++q) {
      // x = w * (p / d1, q / d2), reduced exactly before converting.
      const i128 den = d1 * d2;
      i128 nx = (w[0][0] * p * d2 + w[0][1] * q * d1) % den;
      i128 ny = (w[1][0] * p * d2 + w[1][1] * q * d1) % den;
      if (nx < 0) nx += den;
      if (ny < 0) ny += den;
      pts.emplace_back(static_cast<double>(nx) / static_cast<double>(den),
                       static_cast<double>(ny) / static_cast<double>(den));
    }
  }
  std::sort(pts.begin(), pts.end(), [](const TorusPoint& a, const TorusPoint& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  return pts;
}

std::array<i128, 2> row(i128 a, i128 b) { return {a, b}; }

}  // namespace

std::int64_t periodic_point_count(const IntMat2& a, int n) {
  if (n < 1) throw InvalidArgument("periodic_point_count: n must be >= 1");
  const Power p = power(a, n);
  return static_cast<std::int64_t>(abs128((p.a - 1) * (p.d - 1) - p.b * p.c));
}

std::vector<TorusPoint> linear_periodic_points(const IntMat2& a, int n, std::size_t limit) {
  if (n < 1) throw InvalidArgument("linear_periodic_points: n must be >= 1");
  const Power p = power(a, n);
  return lattice_points({row(p.a - 1, p.b), row(p.c, p.d - 1)}, limit);
}

std::vector<TorusPoint> linear_common_points(const IntMat2& a, const IntMat2& b, int n, std::size_t limit) {
  if (n < 1) throw InvalidArgument("linear_common_points: n must be >= 1");
  const Power p = power(a, n);
  const Power q = power(b, n);
  return lattice_points({row(p.a - 1, p.b), row(p.c, p.d - 1), row(q.a - 1, q.b), row(q.c, q.d - 1)}, limit);
}

TorusPoint refine_periodic_point(const TorusMap& f, const TorusPoint& start, int n, double radius) {
  if (n < 1) throw InvalidArgument("refine_periodic_point: n must be >= 1");
  // Integer shift from the linear part: A^n x0 - x0.
  const Mat2 an = [&] {
    Mat2 m = Mat2::identity();
    for (int k = 0; k < n; ++k) m = f.matrix().to_real() * m;
    return m;
  }();
  const Vec2 x0 = start.vec();
  const Vec2 lin = an * x0 - x0;
  const Vec2 shift{std::round(lin.x), std::round(lin.y)};
  Vec2 x = x0;
  for (int it = 0; it < 60; ++it) {
    Vec2 y = x;
    Mat2 d = Mat2::identity();
    for (int k = 0; k < n; ++k) {
      d = f.differential(y) * d;
      y = f.lift(y);
    }
    const Vec2 r = y - x - shift;
    if (norm(r) <= 1e-12) return TorusPoint(x);
    const Mat2 j = d - Mat2::identity();
    const double det = j.det();
    if (std::fabs(det) < 1e-300) break;
    const Vec2 step{(j.d * r.x - j.b * r.y) / det, (-j.c * r.x + j.a * r.y) / det};
    x -= step;
    if (norm(x - x0) > radius) {
      throw NewtonDivergence("Newton left the convergence radius around (" + fmt(start.x) + ", " + fmt(start.y) + ")");
    }
  }
  throw NewtonDivergence("Newton did not converge near (" + fmt(start.x) + ", " + fmt(start.y) + ")");
}

PeriodicReport common_periodic_points(const TorusMap& f, const TorusMap& g, int period_max) {
  if (period_max < 1 || period_max > 12) throw InvalidArgument("common_periodic_points: period_max must be in [1, 12]");
  PeriodicReport rep;
  for (int n = 1; n <= period_max; ++n) {
    std::vector<TorusPoint> common;
    for (const TorusPoint& x : linear_common_points(f.matrix(), g.matrix(), n)) {
      PeriodicCandidate c;
      c.period = n;
      c.linear = x;
      try {
        c.refined_f = f.is_linear() ? x : refine_periodic_point(f, x, n);
        c.refined_g = g.is_linear() ? x : refine_periodic_point(g, x, n);
        c.converged = true;
        c.common = torus_distance(c.refined_f, c.refined_g) <= 1e-9;
      } catch (const NewtonDivergence& e) {
        c.note = e.what();
      }
      if (c.common) common.push_back(c.refined_f);
      rep.candidates.push_back(c);
    }
    rep.common.push_back(std::move(common));
  }
  return rep;
}

std::string periodic_csv(const PeriodicReport& report) {
  std::ostringstream os;
  os << "period,x,y,fx,fy,gx,gy,converged,common\n";
  for (const auto& c : report.candidates) {
    os << c.period << ',' << fmt(c.linear.x) << ',' << fmt(c.linear.y) << ',' << fmt(c.refined_f.x) << ','
       << fmt(c.refined_f.y) << ',' << fmt(c.refined_g.x) << ',' << fmt(c.refined_g.y) << ',' << fmt(c.converged)
       << ',' << fmt(c.common) << '\n';
  }
  return os.str();
}

}  // namespace torus_lab
