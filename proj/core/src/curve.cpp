#include "torus_lab/curve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "torus_lab/errors.hpp"
#include "torus_lab/format.hpp"
#include "torus_lab/parallel.hpp"
#include "torus_lab/rng.hpp"

namespace torus_lab {
namespace {

// Quintic Hermite basis on [0, 1] for (p0, m0, a0, a1, m1, p1) and its
// first two derivatives.
struct Quintic {
  double h[6];
  double d[6];
  double dd[6];
};

Quintic quintic(double r) {
  const double r2 = r * r;
  const double r3 = r2 * r;
  const double r4 = r3 * r;
  const double r5 = r4 * r;
  Quintic q;
  q.h[0] = 1.0 - 10.0 * r3 + 15.0 * r4 - 6.0 * r5;
  q.h[1] = r - 6.0 * r3 + 8.0 * r4 - 3.0 * r5;
  q.h[2] = 0.5 * r2 - 1.5 * r3 + 1.5 * r4 - 0.5 * r5;
  q.h[3] = 0.5 * r3 - r4 + 0.5 * r5;
  q.h[4] = -4.0 * r3 + 7.0 * r4 - 3.0 * r5;
  q.h[5] = 10.0 * r3 - 15.0 * r4 + 6.0 * r5;
  q.d[0] = -30.0 * r2 + 60.0 * r3 - 30.0 * r4;
  q.d[1] = 1.0 - 18.0 * r2 + 32.0 * r3 - 15.0 * r4;
  q.d[2] = r - 4.5 * r2 + 6.0 * r3 - 2.5 * r4;
  q.d[3] = 1.5 * r2 - 4.0 * r3 + 2.5 * r4;
  q.d[4] = -12.0 * r2 + 28.0 * r3 - 15.0 * r4;
  q.d[5] = 30.0 * r2 - 60.0 * r3 + 30.0 * r4;
  q.dd[0] = -60.0 * r + 180.0 * r2 - 120.0 * r3;
  q.dd[1] = -36.0 * r + 96.0 * r2 - 60.0 * r3;
  q.dd[2] = 1.0 - 9.0 * r + 18.0 * r2 - 10.0 * r3;
  q.dd[3] = 3.0 * r - 12.0 * r2 + 10.0 * r3;
  q.dd[4] = -24.0 * r + 84.0 * r2 - 60.0 * r3;
  q.dd[5] = 60.0 * r - 180.0 * r2 + 120.0 * r3;
  return q;
}

// Jet at fraction r of segment k in the curve's own parameter t.
Jet2 interpolate_jet(const CurveJet& c, std::size_t k, double r) {
  const Jet2& j0 = c.jets[k];
  const Jet2& j1 = c.jets[k + 1];
  const double dt = c.t[k + 1] - c.t[k];
  const Vec2 v[6] = {j0.p, dt * j0.d1, dt * dt * j0.d2, dt * dt * j1.d2, dt * j1.d1, j1.p};
  const Quintic q = quintic(r);
  Jet2 out;
  for (int i = 0; i < 6; ++i) {
    out.p += q.h[i] * v[i];
    out.d1 += q.d[i] * v[i];
    out.d2 += q.dd[i] * v[i];
  }
  out.d1 = out.d1 / dt;
  out.d2 = out.d2 / (dt * dt);
  return out;
}

// Cubic Hermite of the log-density and its derivative.
void interpolate_log(const CurveJet& c, std::size_t k, double r, double& l, double& dl) {
  const double dt = c.t[k + 1] - c.t[k];
  const double r2 = r * r;
  const double r3 = r2 * r;
  const double h00 = 2 * r3 - 3 * r2 + 1;
  const double h10 = r3 - 2 * r2 + r;
  const double h01 = -2 * r3 + 3 * r2;
  const double h11 = r3 - r2;
  const double l0 = c.log_density[k];
  const double l1 = c.log_density[k + 1];
  const double m0 = dt * c.dlog_density[k];
  const double m1 = dt * c.dlog_density[k + 1];
  l = h00 * l0 + h10 * m0 + h01 * l1 + h11 * m1;
  const double d00 = 6 * r2 - 6 * r;
  const double d10 = 3 * r2 - 4 * r + 1;
  const double d01 = -6 * r2 + 6 * r;
  const double d11 = 3 * r2 - 2 * r;
  dl = (d00 * l0 + d10 * m0 + d01 * l1 + d11 * m1) / dt;
}

// 5-point Gauss-Legendre on [0, 1].
constexpr double kGaussX[5] = {0.046910077030668, 0.230765344947158, 0.5, 0.769234655052842, 0.953089922969332};
constexpr double kGaussW[5] = {0.118463442528095, 0.239314335249683, 0.284444444444444, 0.239314335249683,
                               0.118463442528095};

double segment_length(const CurveJet& c, std::size_t k) {
  const double dt = c.t[k + 1] - c.t[k];
  double s = 0.0;
  for (int g = 0; g < 5; ++g) s += kGaussW[g] * norm(interpolate_jet(c, k, kGaussX[g]).d1);
  return s * dt;
}

double node_speed_density(const CurveJet& c, std::size_t k) { return std::exp(c.log_density[k]) * norm(c.jets[k].d1); }

// Shift every lift by the same integer vector so the first node is in [0,1)^2.
void recenter(CurveJet& c) {
  if (c.jets.empty()) return;
  const Vec2 shift{std::floor(c.jets[0].p.x), std::floor(c.jets[0].p.y)};
  if (shift.x == 0.0 && shift.y == 0.0) return;
  for (auto& j : c.jets) j.p -= shift;
}

void check_cone(const CurveJet& c, const std::optional<Cone>& cone) {
  if (!cone) return;
  for (const auto& j : c.jets) {
    if (!cone->contains(j.d1, 1e-9)) throw ConeExit("pushed tangent left the unstable cone");
  }
}

}  // namespace

CurveJet CurveJet::segment(const Vec2& p, const Vec2& u, double length, double spacing, double mass,
                           double log_slope) {
  if (!(length > 0.0) || !(spacing > 0.0)) throw InvalidArgument("segment: length and spacing must be positive");
  const Vec2 dir = normalized(u);
  const std::size_t pieces = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(length / spacing)));
  CurveJet c;
  c.spacing = spacing;
  for (std::size_t k = 0; k <= pieces; ++k) {
    const double s = length * static_cast<double>(k) / pieces;
    c.t.push_back(s);
    c.jets.push_back({p + s * dir, dir, {}});
    c.log_density.push_back(log_slope * s);
    c.dlog_density.push_back(log_slope);
  }
  c.lipschitz = std::fabs(log_slope);
  c.set_mass(mass);
  return c;
}

double CurveJet::mass() const {
  double m = 0.0;
  for (std::size_t k = 0; k + 1 < size(); ++k) {
    m += 0.5 * (node_speed_density(*this, k) + node_speed_density(*this, k + 1)) * (t[k + 1] - t[k]);
  }
  return m;
}

void CurveJet::set_mass(double target) {
  const double m = mass();
  if (!(m > 0.0)) throw InvalidArgument("curve has zero mass");
  const double shift = std::log(target / m);
  for (double& l : log_density) l += shift;
}

std::vector<double> CurveJet::arclength() const {
  std::vector<double> s(size(), 0.0);
  for (std::size_t k = 0; k + 1 < size(); ++k) s[k + 1] = s[k] + segment_length(*this, k);
  return s;
}

double CurveJet::length() const { return size() < 2 ? 0.0 : arclength().back(); }

double CurveJet::max_abs_curvature() const {
  double m = 0.0;
  for (const auto& j : jets) m = std::max(m, std::fabs(curvature(j)));
  return m;
}

double CurveJet::log_density_lipschitz() const {
  double m = 0.0;
  for (std::size_t k = 0; k < size(); ++k) m = std::max(m, std::fabs(dlog_density[k]) / norm(jets[k].d1));
  return m;
}

double CurveJet::log_density_secant_lipschitz() const {
  double m = 0.0;
  for (std::size_t k = 0; k + 1 < size(); ++k) {
    const double len = segment_length(*this, k);
    if (len > 0.0) m = std::max(m, std::fabs(log_density[k + 1] - log_density[k]) / len);
  }
  return m;
}

Vec2 CurveJet::segment_position(std::size_t k, double r) const { return interpolate_jet(*this, k, r).p; }

Vec2 CurveJet::position_at_arclength(double s) const {
  if (size() < 2) return jets.empty() ? Vec2{} : jets[0].p;
  const std::vector<double> cum = arclength();
  s = std::clamp(s, 0.0, cum.back());
  const auto it = std::upper_bound(cum.begin(), cum.end(), s);
  const std::size_t k = std::min<std::size_t>(size() - 2, static_cast<std::size_t>(std::max<long>(0, it - cum.begin() - 1)));
  const double len = cum[k + 1] - cum[k];
  const double r = len > 0.0 ? (s - cum[k]) / len : 0.0;
  return segment_position(k, r);
}

CurveJet restrict_curve(const CurveJet& c, std::size_t first, std::size_t last) {
  if (first > last || last >= c.size()) throw InvalidArgument("restrict_curve: bad node range");
  CurveJet out;
  out.spacing = c.spacing;
  out.lipschitz = c.lipschitz;
  out.t.assign(c.t.begin() + first, c.t.begin() + last + 1);
  out.jets.assign(c.jets.begin() + first, c.jets.begin() + last + 1);
  out.log_density.assign(c.log_density.begin() + first, c.log_density.begin() + last + 1);
  out.dlog_density.assign(c.dlog_density.begin() + first, c.dlog_density.begin() + last + 1);
  return out;
}

CurveJet refine_curve(const CurveJet& c, const std::vector<int>& pieces) {
  if (pieces.size() + 1 != c.size()) throw InvalidArgument("refine_curve: one piece count per segment");
  CurveJet out;
  out.spacing = c.spacing;
  out.lipschitz = c.lipschitz;
  for (std::size_t k = 0; k + 1 < c.size(); ++k) {
    const int p = std::max(1, pieces[k]);
    for (int q = 0; q < p; ++q) {
      if (q == 0) {
        out.t.push_back(c.t[k]);
        out.jets.push_back(c.jets[k]);
        out.log_density.push_back(c.log_density[k]);
        out.dlog_density.push_back(c.dlog_density[k]);
        continue;
      }
      const double r = static_cast<double>(q) / p;
      double l = 0.0;
      double dl = 0.0;
      interpolate_log(c, k, r, l, dl);
      out.t.push_back(c.t[k] + r * (c.t[k + 1] - c.t[k]));
      out.jets.push_back(interpolate_jet(c, k, r));
      out.log_density.push_back(l);
      out.dlog_density.push_back(dl);
    }
  }
  if (c.size() > 0) {
    const std::size_t k = c.size() - 1;
    out.t.push_back(c.t[k]);
    out.jets.push_back(c.jets[k]);
    out.log_density.push_back(c.log_density[k]);
    out.dlog_density.push_back(c.dlog_density[k]);
  }
  return out;
}

CurveJet to_unit_speed(const CurveJet& c) {
  CurveJet out = c;
  const std::vector<double> cum = c.arclength();
  for (std::size_t k = 0; k < c.size(); ++k) {
    const Jet2& j = c.jets[k];
    const double s = norm(j.d1);
    const Vec2 u = j.d1 / s;
    out.jets[k].d1 = u;
    out.jets[k].d2 = (j.d2 - dot(j.d2, u) * u) / (s * s);
    out.dlog_density[k] = c.dlog_density[k] / s;
    out.t[k] = cum[k];
  }
  return out;
}

CurveJet push_curve_once(const TorusMap& f, const CurveJet& c) {
  CurveJet out = c;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const Jet2& j = c.jets[k];
    const Jet2 pj = f.push_jet(j);
    const double n0 = dot(j.d1, j.d1);
    const double n1 = dot(pj.d1, pj.d1);
    out.jets[k] = pj;
    out.log_density[k] = c.log_density[k] + 0.5 * std::log(n0 / n1);
    out.dlog_density[k] = c.dlog_density[k] + dot(j.d1, j.d2) / n0 - dot(pj.d1, pj.d2) / n1;
  }
  recenter(out);
  return out;
}

CurveJet push_curve(const GeneratorLaw& law, const CurveJet& curve, const Word& word, bool resample,
                    const PushOptions& options) {
  if (curve.size() < 2) throw InvalidArgument("push_curve: curve needs at least two nodes");
  CurveJet c = curve;
  const std::size_t n = word.size();
  const std::size_t block = (resample && options.resample_every > 0) ? options.resample_every : std::max<std::size_t>(n, 1);
  for (std::size_t start = 0; start < n; start += block) {
    const std::size_t end = std::min(n, start + block);
    if (resample && options.resample_every > 0) {
      // Stretch of each node's tangent over the block.
      std::vector<double> stretch(c.size());
      for (std::size_t k = 0; k < c.size(); ++k) {
        Vec2 p = c.jets[k].p;
        Vec2 v = c.jets[k].d1;
        const double v0 = norm(v);
        for (std::size_t l = start; l < end; ++l) {
          const TorusMap& f = law.maps[word.indices[l]];
          v = f.differential(p) * v;
          p = f.lift(p);
          p = {p.x - std::floor(p.x), p.y - std::floor(p.y)};
        }
        stretch[k] = norm(v) / v0;
      }
      std::vector<double> image_len(c.size() - 1);
      for (std::size_t k = 0; k + 1 < c.size(); ++k) {
        image_len[k] = segment_length(c, k) * std::max(stretch[k], stretch[k + 1]);
      }
      if (options.max_length > 0.0) {
        double total = 0.0;
        for (double l : image_len) total += l;
        if (total > options.max_length) {
          const double lo = 0.5 * (total - options.max_length);
          const double hi = lo + options.max_length;
          std::size_t first = 0;
          std::size_t last = c.size() - 1;
          double acc = 0.0;
          bool found_first = false;
          for (std::size_t k = 0; k + 1 < c.size(); ++k) {
            if (!found_first && acc + image_len[k] > lo) {
              first = k;
              found_first = true;
            }
            acc += image_len[k];
            if (acc >= hi) {
              last = k + 1;
              break;
            }
          }
          c = restrict_curve(c, first, last);
          image_len = std::vector<double>(image_len.begin() + first, image_len.begin() + last);
        }
      }
      std::vector<int> pieces(image_len.size());
      for (std::size_t k = 0; k < pieces.size(); ++k) {
        pieces[k] = std::max(1, static_cast<int>(std::ceil(image_len[k] / c.spacing)));
      }
      const double m = c.mass();
      c = refine_curve(c, pieces);
      c.set_mass(m);
    }
    for (std::size_t l = start; l < end; ++l) {
      c = push_curve_once(law.maps[word.indices[l]], c);
      check_cone(c, options.cone_u);
    }
    if (resample && options.resample_every > 0) {
      const double m = c.mass();
      c = to_unit_speed(c);
      c.set_mass(m);
    }
  }
  return c;
}

KZero compute_k0(const GeneratorLaw& law, const ConeSystem& cones, int n_probe, int samples, std::uint64_t seed) {
  law.validate();
  if (n_probe < 1 || samples < 1) throw InvalidArgument("compute_k0: n_probe and samples must be >= 1");
  KZero out;
  out.n2 = n_probe;
  bool linear = true;
  for (const auto& f : law.maps) linear = linear && f.is_linear();
  std::vector<double> a(static_cast<std::size_t>(samples));
  std::vector<double> b(static_cast<std::size_t>(samples));
  parallel_for(a.size(), [&](unsigned, std::size_t s) {
    CounterRng rng(derive_seed(seed, s));
    const Word w = sample_word(law, static_cast<std::size_t>(n_probe), rng());
    Jet2 j{{rng.uniform(), rng.uniform()}, cones.cone_u.direction(rng.uniform()), {}};
    double log_det = 0.0;
    for (int idx : w.indices) {
      const TorusMap& f = law.maps[idx];
      log_det += std::log(std::fabs(f.differential(j.p).det()));
      j = f.push_jet(j);
      j.p = {j.p.x - std::floor(j.p.x), j.p.y - std::floor(j.p.y)};
    }
    const double s3 = std::pow(norm(j.d1), 3);
    a[s] = std::exp(log_det) / s3;
    b[s] = std::fabs(cross(j.d1, j.d2)) / s3;
  });
  for (std::size_t s = 0; s < a.size(); ++s) {
    out.a = std::max(out.a, a[s]);
    out.b = std::max(out.b, b[s]);
  }
  if (out.a >= 1.0) throw ContractionFailure("compute_k0: curvature factor a(n) >= 1; increase n_probe");
  out.k0 = (linear || out.b == 0.0) ? 1.0 : 2.0 * out.b / (1.0 - out.a);
  return out;
}

CurveContext CurveContext::from(const ConeSystem& cones, const CertReport& cert) {
  return {DirectionContext::from(cones, cert), cert.lambda_u_minus, cert.c0pp};
}

namespace {

struct OffsetPush {
  Vec2 delta;      // y_0 - x_0
  double log_gap;  // log |Df^n(y_-n) e| - log |Df^n(x_-n) e|
  Vec2 ux;         // pushed direction at x
  double log_x;    // log |Df^n(x_-n) e|
};

OffsetPush propagate(const GeneratorLaw& law, const std::vector<int>& letters, const std::vector<Vec2>& orbit,
                     const Vec2& e, double c) {
  // orbit[k] is x_{-(n-k)}, letters[k] maps it to orbit[k+1].
  OffsetPush out{c * e, 0.0, e, 0.0};
  Vec2 ty = e;
  for (std::size_t k = 0; k < letters.size(); ++k) {
    const TorusMap& f = law.maps[letters[k]];
    const Vec2 sx = f.differential(orbit[k]) * out.ux;
    const Vec2 sy = f.differential(orbit[k] + out.delta) * ty;
    const double nx = norm(sx);
    const double ny = norm(sy);
    out.log_gap += std::log(ny) - std::log(nx);
    out.log_x += std::log(nx);
    out.ux = sx / nx;
    ty = sy / ny;
    out.delta = f.lift_difference(orbit[k], out.delta);
  }
  return out;
}

}  // namespace

DensityRatio density_ratio_at_offset(const GeneratorLaw& law, const CurveContext& ctx, const Word& word_past,
                                     const TorusPoint& x, double offset, int n_trunc) {
  if (n_trunc < 0 || static_cast<std::size_t>(n_trunc) > word_past.size()) {
    throw InvalidArgument("density_ratio: past word shorter than n_trunc");
  }
  const std::size_t n = static_cast<std::size_t>(n_trunc);
  const std::size_t len = word_past.size();
  std::vector<int> letters(n);
  std::vector<Vec2> orbit(n + 1);
  orbit[n] = x.vec();
  TorusPoint p = x;
  for (std::size_t k = 0; k < n; ++k) {
    const int idx = word_past.indices[len - 1 - k];
    letters[n - 1 - k] = idx;
    p = law.maps[idx].inverse(p);
    orbit[n - 1 - k] = p.vec();
  }
  const Vec2 e = ctx.directions.cone_u.direction(0.5);

  DensityRatio out;
  out.y_actual = x;
  if (offset == 0.0) return out;

  const OffsetPush base = propagate(law, letters, orbit, e, 0.0);
  double c0 = offset / std::exp(base.log_x);
  OffsetPush r0 = propagate(law, letters, orbit, e, c0);
  double g0 = dot(r0.delta, base.ux) - offset;
  double c1 = c0 * offset / (g0 + offset);
  OffsetPush r1 = propagate(law, letters, orbit, e, c1);
  double g1 = dot(r1.delta, base.ux) - offset;
  for (int it = 0; it < 40 && std::fabs(g1) > 1e-14 * std::fabs(offset) && g1 != g0; ++it) {
    const double c2 = c1 - g1 * (c1 - c0) / (g1 - g0);
    c0 = c1;
    g0 = g1;
    c1 = c2;
    r1 = propagate(law, letters, orbit, e, c1);
    g1 = dot(r1.delta, base.ux) - offset;
  }
  // J_x(y) = |Df^n(x_-n) e| / |Df^n(y_-n) e|.
  out.log_ratio = -r1.log_gap;
  out.ratio = std::exp(out.log_ratio);
  out.y_actual = TorusPoint(x.vec() + r1.delta);
  out.offset = dot(r1.delta, base.ux);

  double lip = 0.0;
  double cond = 0.0;
  for (const auto& f : law.maps) {
    lip = std::max(lip, f.second_derivative_bound() * f.inverse_derivative_bound());
    cond = std::max(cond, f.derivative_bound() * f.inverse_derivative_bound());
  }
  const double lu = std::max(ctx.lambda_u_minus, 1.0 + 1e-9);
  const double r = std::min(ctx.directions.rate, 1.0 - 1e-9);
  const double depth_gap = std::fabs(c1) * ctx.c0pp * ctx.c0pp / (lu - 1.0);
  const double angle_tail = (lip > 0.0 ? 2.0 * cond * ctx.directions.c4 * std::pow(r, n_trunc) / (1.0 - r) : 0.0);
  out.tail_bound = lip * depth_gap + angle_tail;
  return out;
}

DensityRatio density_ratio(const GeneratorLaw& law, const CurveContext& ctx, const Word& word_past,
                           const TorusPoint& x, const TorusPoint& y, int n_trunc) {
  // Offset of y along the unstable direction at x.
  const LineEstimate eu = unstable_direction(law, ctx.directions, word_past, x, n_trunc);
  const double offset = dot(displacement(x, y), eu.line);
  return density_ratio_at_offset(law, ctx, word_past, x, offset, n_trunc);
}

GridMeasure srb_from_curve(const GeneratorLaw& law, const CurveJet& curve, int n, int samples, std::uint64_t seed,
                           int resolution) {
  if (n < 1 || samples < 1) throw InvalidArgument("srb_from_curve: n and samples must be >= 1");
  const std::vector<double> cum = curve.arclength();
  const double total = cum.back();
  auto start = [&](std::size_t, CounterRng& rng) {
    const double s = rng.uniform() * total;
    const auto it = std::upper_bound(cum.begin(), cum.end(), s);
    const std::size_t k =
        std::min<std::size_t>(curve.size() - 2, static_cast<std::size_t>(std::max<long>(0, it - cum.begin() - 1)));
    const double len = cum[k + 1] - cum[k];
    return TorusPoint(curve.segment_position(k, len > 0.0 ? (s - cum[k]) / len : 0.0));
  };
  return accumulate_orbits(law, static_cast<std::size_t>(samples), start, 0, n - 1, seed, resolution).to_measure();
}

PointCloudMeasure sample_curve_measure(const CurveJet& curve, std::size_t count, std::uint64_t seed) {
  if (curve.size() < 2 || count == 0) throw InvalidArgument("sample_curve_measure: empty curve or sample");
  const std::size_t segs = curve.size() - 1;
  std::vector<double> cdf(segs + 1, 0.0);
  for (std::size_t k = 0; k < segs; ++k) {
    cdf[k + 1] = cdf[k] + 0.5 * (node_speed_density(curve, k) + node_speed_density(curve, k + 1)) *
                              (curve.t[k + 1] - curve.t[k]);
  }
  const double mass = cdf.back();
  std::vector<TorusPoint> pts(count);
  CounterRng rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    const double u = rng.uniform() * mass;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const std::size_t k = std::min(segs - 1, static_cast<std::size_t>(std::max<long>(0, it - cdf.begin() - 1)));
    // Linear density across the segment: invert its CDF.
    const double a = node_speed_density(curve, k);
    const double b = node_speed_density(curve, k + 1);
    const double v = rng.uniform();
    double r = v;
    if (std::fabs(b - a) > 1e-12 * (a + b)) r = (std::sqrt(a * a + (b * b - a * a) * v) - a) / (b - a);
    pts[i] = TorusPoint(curve.segment_position(k, r));
  }
  return PointCloudMeasure(std::move(pts), std::vector<double>(count, mass / count));
}

std::string curve_csv(const CurveJet& c) {
  std::ostringstream os;
  os << "t,x,y,dx,dy,kappa,log_density\n";
  for (std::size_t k = 0; k < c.size(); ++k) {
    const Jet2& j = c.jets[k];
    os << fmt(c.t[k]) << ',' << fmt(wrap_unit(j.p.x)) << ',' << fmt(wrap_unit(j.p.y)) << ',' << fmt(j.d1.x) << ','
       << fmt(j.d1.y) << ',' << fmt(curvature(j)) << ',' << fmt(c.log_density[k]) << '\n';
  }
  return os.str();
}

}  // namespace torus_lab
