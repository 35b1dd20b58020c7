#include "torus_lab/fit.hpp"

#include <cmath>

#include "torus_lab/errors.hpp"

namespace torus_lab {

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw InvalidArgument("linear_fit: size mismatch");
  const std::size_t n = x.size();
  if (n < 2) throw InvalidArgument("linear_fit: need at least two points");
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw InvalidArgument("linear_fit: x values are all equal");
  LinearFit f;
  f.points = static_cast<int>(n);
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

namespace {

LinearFit log_fit(const std::vector<double>& x, const std::vector<double>& y, bool log_x) {
  if (x.size() != y.size()) throw InvalidArgument("log fit: size mismatch");
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(y[i] > 0.0)) continue;
    if (log_x && !(x[i] > 0.0)) continue;
    lx.push_back(log_x ? std::log(x[i]) : x[i]);
    ly.push_back(std::log(y[i]));
  }
  return linear_fit(lx, ly);
}

}  // namespace

LinearFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) { return log_fit(x, y, true); }

LinearFit semilog_fit(const std::vector<double>& x, const std::vector<double>& y) { return log_fit(x, y, false); }

}  // namespace torus_lab
