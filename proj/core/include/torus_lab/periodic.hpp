#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "torus_lab/torus_map.hpp"

namespace torus_lab {

/// |det(A^n - I)|, the number of period-n points of the linear map.
std::int64_t periodic_point_count(const IntMat2& a, int n);

/// All x with A^n x = x mod 1, exactly (Smith normal form of A^n - I).
/// Throws EnumerationTooLarge above `limit` points.
std::vector<TorusPoint> linear_periodic_points(const IntMat2& a, int n, std::size_t limit = 1000000);

/// All x fixed by both A^n and B^n mod 1.
std::vector<TorusPoint> linear_common_points(const IntMat2& a, const IntMat2& b, int n,
                                             std::size_t limit = 1000000);

struct PeriodicCandidate {
  int period = 0;
  TorusPoint linear;      // common point of the linear parts
  TorusPoint refined_f;   // Newton solution of f^n(x) = x near it
  TorusPoint refined_g;
  bool converged = false; // both Newton solves converged within the radius
  bool common = false;    // converged and the refined points coincide
  std::string note;       // NewtonDivergence message when dropped
};

struct PeriodicReport {
  std::vector<PeriodicCandidate> candidates;
  /// Common points per period 1..period_max (after refinement).
  std::vector<std::vector<TorusPoint>> common;
};

/// Newton solve of F^n(x) = x + k from the linear candidate, where k is the
/// integer shift of the linear solution. Throws NewtonDivergence if it
/// leaves the ball of `radius` or does not reach 1e-12.
TorusPoint refine_periodic_point(const TorusMap& f, const TorusPoint& start, int n, double radius = 0.1);

/// Common periodic points of f and g for periods 1..period_max (<= 12).
/// Linear parts give exact candidates; perturbed maps refine each candidate
/// by Newton and keep it if both solutions agree within 1e-9.
PeriodicReport common_periodic_points(const TorusMap& f, const TorusMap& g, int period_max);

std::string periodic_csv(const PeriodicReport& report);

}  // namespace torus_lab
