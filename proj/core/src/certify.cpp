#include "torus_lab/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "torus_lab/errors.hpp"
#include "torus_lab/format.hpp"
#include "torus_lab/parallel.hpp"

namespace torus_lab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBoundaryTolerance = 1e-12;

// cos^2, cos*sin, sin^2 of the sampled directions and 1 / |v|_q^2.
struct DirectionTable {
  std::vector<double> cc;
  std::vector<double> cs;
  std::vector<double> ss;
  std::vector<double> inv_den;
};

DirectionTable make_table(const Cone& cone, const Mat2& q, int count) {
  DirectionTable t;
  t.cc.resize(count);
  t.cs.resize(count);
  t.ss.resize(count);
  t.inv_den.resize(count);
  for (int k = 0; k < count; ++k) {
    const Vec2 v = cone.direction(static_cast<double>(k) / (count - 1));
    t.cc[k] = v.x * v.x;
    t.cs[k] = 2.0 * v.x * v.y;
    t.ss[k] = v.y * v.y;
    t.inv_den[k] = 1.0 / dot(v, q * v);
  }
  return t;
}

// min/max over the table of |M v|_q^2 / |v|_q^2.
void ratio_range(const Mat2& m, const Mat2& q, const DirectionTable& t, double& lo, double& hi) {
  const Mat2 nq = m.transpose() * q * m;
  const double n11 = nq.a;
  const double n12 = 0.5 * (nq.b + nq.c);
  const double n22 = nq.d;
  double mn = kInf;
  double mx = 0.0;
  const std::size_t count = t.cc.size();
  for (std::size_t k = 0; k < count; ++k) {
    const double r = (n11 * t.cc[k] + n12 * t.cs[k] + n22 * t.ss[k]) * t.inv_den[k];
    mn = std::min(mn, r);
    mx = std::max(mx, r);
  }
  lo = std::sqrt(mn);
  hi = std::sqrt(mx);
}

struct Invariance {
  bool ok = true;
  double offset_lo = 0.0;  // offsets of the image arc inside the cone
  double offset_hi = 0.0;
  Vec2 bad_vector;
};

// M maps the open arc into itself iff the images of both boundary rays and
// of the middle ray lie in the closed arc, in order.
Invariance check_invariance(const Mat2& m, const Cone& cone) {
  Invariance inv;
  const double tol = kBoundaryTolerance;
  const Vec2 dirs[3] = {cone.direction(0.0), cone.direction(0.5), cone.direction(1.0)};
  double off[3];
  for (int k = 0; k < 3; ++k) {
    const double a = line_angle(m * dirs[k]);
    if (!cone.contains(a, tol)) {
      inv.ok = false;
      inv.bad_vector = dirs[k];
      return inv;
    }
    off[k] = cone.offset(a);
    if (off[k] > cone.width + tol) off[k] = 0.0;  // wrapped just below lo
    off[k] = std::min(off[k], cone.width);
  }
  inv.offset_lo = std::min(off[0], off[2]);
  inv.offset_hi = std::max(off[0], off[2]);
  if (off[1] < inv.offset_lo - tol || off[1] > inv.offset_hi + tol) {
    inv.ok = false;
    inv.bad_vector = dirs[1];
  }
  return inv;
}

struct MapAcc {
  double u_min = kInf;
  double u_max = 0.0;
  double s_min = kInf;
  double s_max = 0.0;
};

struct RowAcc {
  MapAcc maps[2];
  double u_off_lo = kInf;
  double u_off_hi = -kInf;
  double s_off_lo = kInf;
  double s_off_hi = -kInf;
  double det_max = 0.0;
  double theta_u = kInf;
  int theta_u_j = -1;
  double theta_s = kInf;
  int theta_s_j = -1;
  // First violation in this row (by column), per condition kind.
  int invariance_j = -1;
  Witness invariance_witness;
  int rate_j = -1;
  Witness rate_witness;
};

}  // namespace

Vec2 map_unstable_line(const TorusMap& f, const Cone& cone_u, const Vec2& x, int n) {
  std::vector<Vec2> orbit(static_cast<std::size_t>(n));
  TorusPoint p(x);
  for (int k = 0; k < n; ++k) {
    p = f.inverse(p);
    orbit[k] = p.vec();
  }
  Vec2 v = cone_u.direction(0.5);
  for (int k = n - 1; k >= 0; --k) v = normalized(f.differential(orbit[k]) * v);
  return v;
}

Vec2 map_stable_line(const TorusMap& f, const Cone& cone_s, const Vec2& x, int n) {
  std::vector<Vec2> orbit(static_cast<std::size_t>(n));
  TorusPoint p(x);
  for (int k = 0; k < n; ++k) {
    orbit[k] = p.vec();
    p = f.apply(p);
  }
  Vec2 v = cone_s.direction(0.5);
  for (int k = n - 1; k >= 0; --k) v = normalized(f.differential(orbit[k]).inverse() * v);
  return v;
}

CertReport certify(const TorusMap& f, const TorusMap& g, const ConeSystem& cones, int grid_n,
                   const CertifyOptions& options) {
  cones.validate();
  if (grid_n < 64) throw InvalidArgument("certify: grid_n must be >= 64");
  if (options.directions < 2) throw InvalidArgument("certify: need at least 2 directions per cone");
  const TorusMap* maps[2] = {&f, &g};
  const DirectionTable table_u = make_table(cones.cone_u, cones.metric_u, options.directions);
  const DirectionTable table_s = make_table(cones.cone_s, cones.metric_s, options.directions);
  const std::size_t n = static_cast<std::size_t>(grid_n);

  std::vector<RowAcc> rows(n);
  std::vector<CertGridRow> grid_rows(options.keep_rows ? n * n : 0);

  parallel_for(n, [&](unsigned, std::size_t i) {
    RowAcc& acc = rows[i];
    for (std::size_t j = 0; j < n; ++j) {
      const Vec2 x{static_cast<double>(i) / grid_n, static_cast<double>(j) / grid_n};
      CertGridRow row;
      row.i = static_cast<int>(i);
      row.j = static_cast<int>(j);
      row.u_ratio_min = row.s_ratio_min = kInf;
      Vec2 eu[2];
      Vec2 es[2];
      for (int m = 0; m < 2; ++m) {
        const Mat2 d = maps[m]->differential(x);
        const Mat2 d_inv = d.inverse();
        acc.det_max = std::max(acc.det_max, std::fabs(d.det()));

        const Invariance iu = check_invariance(d, cones.cone_u);
        const Invariance is = check_invariance(d_inv, cones.cone_s);
        if ((!iu.ok || !is.ok) && acc.invariance_j < 0) {
          acc.invariance_j = static_cast<int>(j);
          acc.invariance_witness = {TorusPoint(x), iu.ok ? is.bad_vector : iu.bad_vector, "C1",
                                    maps[m]->name() + (iu.ok ? ": Df^-1 leaves the stable cone"
                                                             : ": Df leaves the unstable cone")};
        }
        if (iu.ok) {
          acc.u_off_lo = std::min(acc.u_off_lo, iu.offset_lo);
          acc.u_off_hi = std::max(acc.u_off_hi, iu.offset_hi);
        }
        if (is.ok) {
          acc.s_off_lo = std::min(acc.s_off_lo, is.offset_lo);
          acc.s_off_hi = std::max(acc.s_off_hi, is.offset_hi);
        }

        double ulo = 0.0;
        double uhi = 0.0;
        double slo = 0.0;
        double shi = 0.0;
        ratio_range(d, cones.metric_u, table_u, ulo, uhi);
        ratio_range(d_inv, cones.metric_s, table_s, slo, shi);
        MapAcc& ma = acc.maps[m];
        ma.u_min = std::min(ma.u_min, ulo);
        ma.u_max = std::max(ma.u_max, uhi);
        ma.s_min = std::min(ma.s_min, slo);
        ma.s_max = std::max(ma.s_max, shi);
        if ((ulo <= 1.0 || slo <= 1.0) && acc.rate_j < 0) {
          acc.rate_j = static_cast<int>(j);
          acc.rate_witness = {TorusPoint(x), ulo <= 1.0 ? cones.cone_u.direction(0.0) : cones.cone_s.direction(0.0),
                              "C1", maps[m]->name() + (ulo <= 1.0 ? ": no expansion in the unstable cone"
                                                                  : ": no contraction in the stable cone")};
        }
        row.u_ratio_min = std::min(row.u_ratio_min, ulo);
        row.u_ratio_max = std::max(row.u_ratio_max, uhi);
        row.s_ratio_min = std::min(row.s_ratio_min, slo);
        row.s_ratio_max = std::max(row.s_ratio_max, shi);

        eu[m] = map_unstable_line(*maps[m], cones.cone_u, x, options.n_trunc);
        es[m] = map_stable_line(*maps[m], cones.cone_s, x, options.n_trunc);
      }
      row.unstable_angle = angle(eu[0], eu[1]);
      row.stable_angle = angle(es[0], es[1]);
      if (row.unstable_angle < acc.theta_u) {
        acc.theta_u = row.unstable_angle;
        acc.theta_u_j = static_cast<int>(j);
      }
      if (row.stable_angle < acc.theta_s) {
        acc.theta_s = row.stable_angle;
        acc.theta_s_j = static_cast<int>(j);
      }
      if (options.keep_rows) grid_rows[i * n + j] = row;
    }
  });

  CertReport rep;
  rep.grid_resolution = grid_n;
  rep.directions = options.directions;
  rep.n_trunc = options.n_trunc;
  rep.c0pp = cones.metric_comparison();
  rep.c4 = kPi * std::pow(rep.c0pp, 4);
  rep.c2_bound = std::max(f.c2_norm_bound(), g.c2_norm_bound());

  MapAcc total;
  double u_off_lo = kInf;
  double u_off_hi = -kInf;
  double s_off_lo = kInf;
  double s_off_hi = -kInf;
  std::size_t theta_u_i = 0;
  std::size_t theta_s_i = 0;
  double theta_u = kInf;
  double theta_s = kInf;
  bool per_map_ok = true;
  std::optional<Witness> first_invariance;
  std::optional<Witness> first_rate;
  for (std::size_t i = 0; i < n; ++i) {
    const RowAcc& r = rows[i];
    for (const MapAcc& m : r.maps) {
      total.u_min = std::min(total.u_min, m.u_min);
      total.u_max = std::max(total.u_max, m.u_max);
      total.s_min = std::min(total.s_min, m.s_min);
      total.s_max = std::max(total.s_max, m.s_max);
    }
    u_off_lo = std::min(u_off_lo, r.u_off_lo);
    u_off_hi = std::max(u_off_hi, r.u_off_hi);
    s_off_lo = std::min(s_off_lo, r.s_off_lo);
    s_off_hi = std::max(s_off_hi, r.s_off_hi);
    rep.det_max = std::max(rep.det_max, r.det_max);
    if (r.theta_u < theta_u) {
      theta_u = r.theta_u;
      theta_u_i = i;
    }
    if (r.theta_s < theta_s) {
      theta_s = r.theta_s;
      theta_s_i = i;
    }
    if (r.invariance_j >= 0 && !first_invariance) first_invariance = r.invariance_witness;
    if (r.rate_j >= 0 && !first_rate) first_rate = r.rate_witness;
  }
  per_map_ok = !first_invariance && !first_rate;

  rep.raw_lambda_u_minus = total.u_min;
  rep.raw_lambda_u_plus = total.u_max;
  rep.raw_lambda_s_plus = 1.0 / total.s_min;
  rep.raw_lambda_s_minus = 1.0 / total.s_max;

  // Lipschitz slack of the sampled ratios over a grid cell.
  const double h = std::sqrt(2.0) / (2.0 * grid_n);
  const double d2 = std::max(f.second_derivative_bound(), g.second_derivative_bound());
  const double inv_bound = std::max(f.inverse_derivative_bound(), g.inverse_derivative_bound());
  auto cond_root = [](const Mat2& q) {
    const double mean = 0.5 * (q.a + q.d);
    const double r = std::hypot(0.5 * (q.a - q.d), q.b);
    return std::sqrt((mean + r) / (mean - r));
  };
  const double slack_u = cond_root(cones.metric_u) * d2 * h;
  const double slack_s = cond_root(cones.metric_s) * inv_bound * inv_bound * d2 * h;
  rep.slack = std::max(slack_u, slack_s);
  rep.lambda_u_minus = total.u_min - slack_u;
  rep.lambda_u_plus = total.u_max + slack_u;
  rep.lambda_s_plus = 1.0 / std::max(total.s_min - slack_s, 1e-300);
  rep.lambda_s_minus = 1.0 / (total.s_max + slack_s);

  rep.passed[0] = per_map_ok;
  const bool ordered = rep.raw_lambda_s_minus > 0.0 && rep.raw_lambda_s_minus < rep.raw_lambda_s_plus &&
                       rep.raw_lambda_s_plus < 1.0 && 1.0 < rep.raw_lambda_u_minus &&
                       rep.raw_lambda_u_minus < rep.raw_lambda_u_plus;
  rep.passed[1] = per_map_ok && ordered;

  if (per_map_ok) {
    rep.refined_u = {cones.cone_u.at(u_off_lo / cones.cone_u.width), u_off_hi - u_off_lo};
    rep.refined_s = {cones.cone_s.at(s_off_lo / cones.cone_s.width), s_off_hi - s_off_lo};
    rep.theta0 = cone_gap(rep.refined_u, rep.refined_s);
  }
  rep.theta0_literal = cone_gap(cones.cone_u, cones.cone_s);

  rep.det_rate_ok = rep.det_max <= rep.lambda_s_plus * rep.lambda_u_minus;
  rep.direction_error = rep.c4 * std::pow(rep.contraction_rate(), options.n_trunc);
  rep.theta_delta = theta_u;
  rep.theta_delta_s = theta_s;
  const double threshold = 1e-9 + rep.direction_error;
  rep.passed[2] = rep.passed[1] && theta_u > threshold;
  rep.passed[3] = rep.passed[1] && theta_s > threshold;

  if (first_invariance) {
    rep.witness = first_invariance;
  } else if (first_rate) {
    rep.witness = first_rate;
  } else if (!ordered) {
    rep.witness = Witness{TorusPoint(), cones.cone_u.direction(0.0), "C2", "rate constants not strictly ordered"};
  } else if (!rep.passed[2]) {
    const int j = rows[theta_u_i].theta_u_j;
    const Vec2 x{static_cast<double>(theta_u_i) / grid_n, static_cast<double>(j) / grid_n};
    rep.witness = Witness{TorusPoint(x), map_unstable_line(f, cones.cone_u, x, options.n_trunc), "C3",
                          "unstable directions of both maps coincide within the direction error"};
  } else if (!rep.passed[3]) {
    const int j = rows[theta_s_i].theta_s_j;
    const Vec2 x{static_cast<double>(theta_s_i) / grid_n, static_cast<double>(j) / grid_n};
    rep.witness = Witness{TorusPoint(x), map_stable_line(f, cones.cone_s, x, options.n_trunc), "C4",
                          "stable directions of both maps coincide within the direction error"};
  }
  rep.rows = std::move(grid_rows);
  return rep;
}

std::string format_report(const CertReport& r) {
  std::ostringstream os;
  os << "passed=" << fmt(r.all_passed()) << '\n';
  for (int k = 0; k < 4; ++k) os << "passed_c" << (k + 1) << '=' << fmt(r.passed[k]) << '\n';
  os << "lambda_s_minus=" << fmt(r.lambda_s_minus) << '\n'
     << "lambda_s_plus=" << fmt(r.lambda_s_plus) << '\n'
     << "lambda_u_minus=" << fmt(r.lambda_u_minus) << '\n'
     << "lambda_u_plus=" << fmt(r.lambda_u_plus) << '\n'
     << "raw_lambda_s_minus=" << fmt(r.raw_lambda_s_minus) << '\n'
     << "raw_lambda_s_plus=" << fmt(r.raw_lambda_s_plus) << '\n'
     << "raw_lambda_u_minus=" << fmt(r.raw_lambda_u_minus) << '\n'
     << "raw_lambda_u_plus=" << fmt(r.raw_lambda_u_plus) << '\n'
     << "slack=" << fmt(r.slack) << '\n'
     << "theta0=" << fmt(r.theta0) << '\n'
     << "theta0_literal=" << fmt(r.theta0_literal) << '\n'
     << "theta_delta=" << fmt(r.theta_delta) << '\n'
     << "theta_delta_s=" << fmt(r.theta_delta_s) << '\n'
     << "direction_error=" << fmt(r.direction_error) << '\n'
     << "c0pp=" << fmt(r.c0pp) << '\n'
     << "c0p=" << fmt(r.c2_bound) << '\n'
     << "c4=" << fmt(r.c4) << '\n'
     << "det_max=" << fmt(r.det_max) << '\n'
     << "det_rate_ok=" << fmt(r.det_rate_ok) << '\n'
     << "grid_resolution=" << r.grid_resolution << '\n'
     << "directions=" << r.directions << '\n'
     << "n_trunc=" << r.n_trunc << '\n';
  if (r.witness) {
    os << "witness_condition=" << r.witness->condition << '\n'
       << "witness_x=" << fmt(r.witness->point.x) << '\n'
       << "witness_y=" << fmt(r.witness->point.y) << '\n'
       << "witness_vx=" << fmt(r.witness->vector.x) << '\n'
       << "witness_vy=" << fmt(r.witness->vector.y) << '\n'
       << "witness_detail=" << r.witness->detail << '\n';
  }
  return os.str();
}

}  // namespace torus_lab
