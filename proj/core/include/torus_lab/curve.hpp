#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "torus_lab/certify.hpp"
#include "torus_lab/measure.hpp"
#include "torus_lab/random_system.hpp"
#include "torus_lab/torus_map.hpp"

namespace torus_lab {

/// Sampled curve: jets in a common parameter t (lifted positions, so the
/// polyline never tears), with the log-density of the curve measure
/// against arc length and its t-derivative at every node.
///
/// Mass = integral rho |gamma'| dt (trapezoid in t). Pushing without
/// resampling keeps rho |gamma'| at each node, so mass is conserved exactly.
struct CurveJet {
  std::vector<double> t;
  std::vector<Jet2> jets;
  std::vector<double> log_density;
  std::vector<double> dlog_density;  // d/dt of log_density
  double spacing = 1.0 / 512;        // target arc-length spacing
  double lipschitz = 0.0;            // L budget of log_density (informational)

  std::size_t size() const { return jets.size(); }
  /// Straight segment from p along unit direction u, of the given length,
  /// unit speed, with log-density slope `log_slope` per unit length and
  /// total mass `mass`.
  static CurveJet segment(const Vec2& p, const Vec2& u, double length, double spacing, double mass = 1.0,
                          double log_slope = 0.0);

  double mass() const;
  /// Arc length by Hermite quadrature.
  double length() const;
  /// Cumulative arc length at each node.
  std::vector<double> arclength() const;
  double max_abs_curvature() const;
  /// Largest |d log rho / ds| over nodes (pointwise Lipschitz estimate).
  double log_density_lipschitz() const;
  /// Largest |log rho(i+1) - log rho(i)| / arc(i, i+1) (secant estimate).
  double log_density_secant_lipschitz() const;
  /// Point at arc length s (clamped), from the Hermite interpolant.
  Vec2 position_at_arclength(double s) const;
  /// Position at fraction r in [0,1] of segment k (quintic Hermite).
  Vec2 segment_position(std::size_t k, double r) const;
  /// Renormalize the density so that mass() equals the given value.
  void set_mass(double mass);
};

struct PushOptions {
  /// Refine before every block of this many maps so that node spacing after
  /// the block stays near the target (0 disables resampling).
  int resample_every = 5;
  /// Before each block, keep at most this arc length centered on the middle
  /// of the curve (0 keeps everything). Windowing drops mass by design.
  double max_length = 0.0;
  /// If set, every pushed tangent must stay in this cone (ConeExit).
  std::optional<Cone> cone_u;
};

/// Pushes the curve by f_{w[n-1]} o ... o f_{w[0]} with exact jet transport
/// and the change-of-variables update of the log-density.
CurveJet push_curve(const GeneratorLaw& law, const CurveJet& curve, const Word& word, bool resample,
                    const PushOptions& options = {});

/// One map, no resampling.
CurveJet push_curve_once(const TorusMap& f, const CurveJet& curve);

/// Subcurve between node indices [first, last] (inclusive).
CurveJet restrict_curve(const CurveJet& curve, std::size_t first, std::size_t last);

/// Nodes refined so segment k is split into pieces[k] equal t-pieces.
CurveJet refine_curve(const CurveJet& curve, const std::vector<int>& pieces);

/// Reparametrize each node to unit speed (t becomes cumulative arc length).
CurveJet to_unit_speed(const CurveJet& curve);

struct KZero {
  double k0 = 1.0;
  int n2 = 0;
  double a = 0.0;  // curvature contraction factor at n2
  double b = 0.0;  // curvature offset at n2
};

/// Empirical coefficients of |kappa_n| <= a |kappa| + b over `samples`
/// random (word, point, cone direction) triples at n = n_probe; returns
/// K0 = 2b / (1 - a), or 1 for linear laws. Throws ContractionFailure if
/// a >= 1.
KZero compute_k0(const GeneratorLaw& law, const ConeSystem& cones, int n_probe, int samples, std::uint64_t seed);

struct DensityRatio {
  double ratio = 1.0;
  double log_ratio = 0.0;
  double tail_bound = 0.0;  // bound on |log J_n - log J|
  TorusPoint y_actual;      // point of the unstable curve through x that was used
  double offset = 0.0;      // signed offset of y_actual from x along E^u
};

/// Constants for direction and tail bounds.
struct CurveContext {
  DirectionContext directions;
  double lambda_u_minus = 1.0;
  double c0pp = 1.0;

  static CurveContext from(const ConeSystem& cones, const CertReport& cert);
};

/// J_{w,x}(y) = lim |D_y f^-n|_{E^u}| / |D_x f^-n|_{E^u}| truncated at
/// n_trunc for y on the local unstable curve of x (the last n_trunc letters
/// of word_past are the past). y is matched by its signed offset along E^u_x.
DensityRatio density_ratio(const GeneratorLaw& law, const CurveContext& ctx, const Word& word_past,
                           const TorusPoint& x, const TorusPoint& y, int n_trunc);

/// Same, with the point given directly by its offset along E^u_x.
DensityRatio density_ratio_at_offset(const GeneratorLaw& law, const CurveContext& ctx, const Word& word_past,
                                     const TorusPoint& x, double offset, int n_trunc);

/// Cesaro average (1/n) sum_{j<n} mu^{*j} * m_gamma of normalized arc length
/// on the curve, sampled with `samples` orbits started uniformly by arc length.
GridMeasure srb_from_curve(const GeneratorLaw& law, const CurveJet& curve, int n, int samples, std::uint64_t seed,
                           int resolution);

/// iid samples of the curve measure (weights mass / count).
PointCloudMeasure sample_curve_measure(const CurveJet& curve, std::size_t count, std::uint64_t seed);

/// CSV rows t,x,y,dx,dy,kappa,log_density.
std::string curve_csv(const CurveJet& curve);

}  // namespace torus_lab
