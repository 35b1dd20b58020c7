#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "torus_lab/cone.hpp"
#include "torus_lab/torus_map.hpp"

namespace torus_lab {

struct Witness {
  TorusPoint point;
  Vec2 vector;
  std::string condition;  // "C1".."C4"
  std::string detail;
};

/// Worst ratios at one grid point (optional CSV output of certify).
struct CertGridRow {
  int i = 0;
  int j = 0;
  double u_ratio_min = 0.0;
  double u_ratio_max = 0.0;
  double s_ratio_min = 0.0;  // of |Df^-1 v|_q / |v|_q
  double s_ratio_max = 0.0;
  double unstable_angle = 0.0;  // angle(E^u_f, E^u_g)
  double stable_angle = 0.0;    // angle(E^s_f, E^s_g)
};

struct CertReport {
  std::array<bool, 4> passed{false, false, false, false};
  // Certified constants (sampled extremes worsened by the grid slack).
  double lambda_s_minus = 0.0;
  double lambda_s_plus = 0.0;
  double lambda_u_minus = 0.0;
  double lambda_u_plus = 0.0;
  // Raw sampled extremes.
  double raw_lambda_s_minus = 0.0;
  double raw_lambda_s_plus = 0.0;
  double raw_lambda_u_minus = 0.0;
  double raw_lambda_u_plus = 0.0;
  double slack = 0.0;
  /// Min angle between the refined (one-step image) cones.
  double theta0 = 0.0;
  /// Min angle between the closures of the given cones.
  double theta0_literal = 0.0;
  Cone refined_u;
  Cone refined_s;
  double theta_delta = 0.0;    // min over grid of angle(E^u_f, E^u_g)
  double theta_delta_s = 0.0;  // min over grid of angle(E^s_f, E^s_g)
  double direction_error = 0.0;  // C4 * (lambda_{s,+}/lambda_{u,-})^n_trunc
  double c0pp = 1.0;             // C0''
  double c4 = 0.0;
  double det_max = 0.0;
  bool det_rate_ok = false;  // sup |det Df| <= lambda_{s,+} lambda_{u,-}
  double c2_bound = 0.0;     // C0'
  int grid_resolution = 0;
  int directions = 0;
  int n_trunc = 0;
  std::optional<Witness> witness;
  std::vector<CertGridRow> rows;

  bool all_passed() const { return passed[0] && passed[1] && passed[2] && passed[3]; }
  /// Cone contraction rate lambda_{s,+} / lambda_{u,-}.
  double contraction_rate() const { return lambda_s_plus / lambda_u_minus; }
};

struct CertifyOptions {
  int directions = 4096;
  int n_trunc = 40;
  bool keep_rows = false;
};

/// Grid verification of (C1)-(C4) for the pair (f, g). Throws InvalidCone,
/// InvalidArgument if grid_n < 64.
CertReport certify(const TorusMap& f, const TorusMap& g, const ConeSystem& cones, int grid_n,
                   const CertifyOptions& options = {});

/// E^u of a single map at x: pull x back n steps, push the cone center forward.
Vec2 map_unstable_line(const TorusMap& f, const Cone& cone_u, const Vec2& x, int n);
/// E^s of a single map at x: push x forward n steps, pull the cone center back.
Vec2 map_stable_line(const TorusMap& f, const Cone& cone_s, const Vec2& x, int n);

/// key=value lines of the report.
std::string format_report(const CertReport& report);

}  // namespace torus_lab
