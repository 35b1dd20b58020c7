#pragma once

#include <vector>

namespace torus_lab {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;  // 1 when y is exactly linear (or constant)
  int points = 0;
};

/// Ordinary least squares y = slope * x + intercept. Needs two distinct x.
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

/// Fit of log y against log x; entries with y <= 0 are skipped.
LinearFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

/// Fit of log y against x (geometric rate exp(slope)); y <= 0 skipped.
LinearFit semilog_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace torus_lab
