#include "torus_lab/measure.hpp"

#include <algorithm>
#include <cmath>

#include "torus_lab/errors.hpp"
#include "torus_lab/parallel.hpp"
#include "torus_lab/rng.hpp"

namespace torus_lab {

GridMeasure GridMeasure::uniform(int n, double total) {
  GridMeasure g(n);
  std::fill(g.mass.begin(), g.mass.end(), total / (static_cast<double>(n) * n));
  return g;
}

double GridMeasure::total() const {
  double s = 0.0;
  for (double v : mass) s += v;
  return s;
}

int GridMeasure::cell_index(const TorusPoint& p) const {
  const int i = std::min(n - 1, static_cast<int>(p.x * n));
  const int j = std::min(n - 1, static_cast<int>(p.y * n));
  return i * n + j;
}

GridMeasure GridMeasure::normalized() const {
  GridMeasure g = *this;
  const double t = total();
  if (t > 0.0) {
    for (double& v : g.mass) v /= t;
  }
  return g;
}

GridMeasure GridMeasure::coarse(int r) const {
  if (r < 1) throw InvalidArgument("coarse: resolution must be >= 1");
  GridMeasure g(r);
  for (int i = 0; i < n; ++i) {
    const int ci = static_cast<int>((i + 0.5) * r / n);
    for (int j = 0; j < n; ++j) {
      const int cj = static_cast<int>((j + 0.5) * r / n);
      g.at(ci, cj) += at(i, j);
    }
  }
  return g;
}

PointCloudMeasure::PointCloudMeasure(std::vector<TorusPoint> points, std::vector<double> weights,
                                     double typical_radius)
    : points_(std::move(points)), weights_(std::move(weights)) {
  if (points_.size() != weights_.size()) throw InvalidArgument("point cloud: points and weights differ in length");
  for (double w : weights_) {
    if (!(w > 0.0)) throw InvalidArgument("point cloud: weights must be positive");
    total_ += w;
  }
  index_ = SpatialIndex(points_, SpatialIndex::suggest_cells(typical_radius, points_.size()));
}

double PointCloudMeasure::ball_mass(const TorusPoint& z, double rho) const {
  double s = 0.0;
  index_.for_each_within(z, rho, [&](std::uint32_t k, const Vec2&) { s += weights_[k]; });
  return s;
}

PointCloudMeasure PointCloudMeasure::scaled(double c) const {
  std::vector<double> w = weights_;
  for (double& v : w) v *= c;
  PointCloudMeasure out;
  out.points_ = points_;
  out.weights_ = std::move(w);
  out.total_ = total_ * c;
  out.index_ = index_;
  return out;
}

GridMeasure PointCloudMeasure::to_grid(int n) const {
  GridMeasure g(n);
  for (std::size_t k = 0; k < points_.size(); ++k) g.deposit(points_[k], weights_[k]);
  return g;
}

double SmoothReference::density(const TorusPoint& p) const {
  double d = 1.0;
  for (const auto& t : terms) d += t.a * std::sin(kTwoPi * (t.k[0] * p.x + t.k[1] * p.y) + t.phase);
  return d;
}

double SmoothReference::c0() const {
  double s = 0.0;
  for (const auto& t : terms) s += std::fabs(t.a);
  return std::max(1.0 + s, 1.0 / (1.0 - s));
}

void SmoothReference::validate() const {
  double s = 0.0;
  for (const auto& t : terms) {
    if (t.k[0] == 0 && t.k[1] == 0) throw InvalidArgument("reference density: term with k = 0");
    s += std::fabs(t.a);
  }
  if (!(s < 1.0)) throw InvalidArgument("reference density: sum of |a| must be < 1");
}

GridBallMass::GridBallMass(const GridMeasure& m) : n_(m.n), total_(m.total()) {
  if (n_ < 1) throw InvalidArgument("grid measure is empty");
  prefix_.assign(static_cast<std::size_t>(n_) * (n_ + 1), 0.0);
  for (int i = 0; i < n_; ++i) {
    double* col = &prefix_[static_cast<std::size_t>(i) * (n_ + 1)];
    for (int j = 0; j < n_; ++j) col[j + 1] = col[j] + m.at(i, j);
  }
}

double GridBallMass::operator()(const TorusPoint& z, double rho) const {
  if (!(rho > 0.0 && rho < 0.25)) throw InvalidArgument("ball_mass: rho must be in (0, 1/4)");
  if (1.0 / n_ > rho / 8.0) throw ResolutionTooCoarse("ball_mass: grid cell larger than rho / 8");
  const double n = n_;
  const long i_lo = static_cast<long>(std::ceil((z.x - rho) * n - 0.5));
  const long i_hi = static_cast<long>(std::floor((z.x + rho) * n - 0.5));
  double s = 0.0;
  for (long ii = i_lo; ii <= i_hi; ++ii) {
    const double dx = (ii + 0.5) / n - z.x;
    const double hy2 = rho * rho - dx * dx;
    if (hy2 < 0.0) continue;
    const double hy = std::sqrt(hy2);
    const long j_lo = static_cast<long>(std::ceil((z.y - hy) * n - 0.5));
    const long j_hi = static_cast<long>(std::floor((z.y + hy) * n - 0.5));
    if (j_hi < j_lo) continue;
    const long col_i = ((ii % n_) + n_) % n_;
    const double* col = &prefix_[static_cast<std::size_t>(col_i) * (n_ + 1)];
    const long a = ((j_lo % n_) + n_) % n_;
    const long len = j_hi - j_lo + 1;
    if (a + len <= n_) {
      s += col[a + len] - col[a];
    } else {
      s += (col[n_] - col[a]) + col[a + len - n_];
    }
  }
  return s;
}

double CloudBallMass::operator()(const TorusPoint& z, double rho) const {
  if (!(rho > 0.0 && rho < 0.25)) throw InvalidArgument("ball_mass: rho must be in (0, 1/4)");
  return m_.ball_mass(z, rho);
}

namespace {

template <class Integrand>
double lattice_integral(int q, const SmoothReference& m, Integrand&& f) {
  if (q < 1) throw InvalidArgument("quadrature_n must be >= 1");
  std::vector<double> rows(static_cast<std::size_t>(q), 0.0);
  parallel_for(rows.size(), [&](unsigned, std::size_t a) {
    double s = 0.0;
    for (int b = 0; b < q; ++b) {
      const TorusPoint z((a + 0.5) / q, (b + 0.5) / q);
      const double w = m.is_lebesgue() ? 1.0 : m.density(z);
      s += w * f(z);
    }
    rows[a] = s;
  });
  double total = 0.0;
  for (double r : rows) total += r;
  return total / (static_cast<double>(q) * q);
}

}  // namespace

double rho_inner(const BallMass& nu, const BallMass& nu2, double rho, const SmoothReference& m, int quadrature_n) {
  if (nu.total() == 0.0 || nu2.total() == 0.0) return 0.0;
  const bool same = &nu == &nu2;
  const double integral = lattice_integral(quadrature_n, m, [&](const TorusPoint& z) {
    const double a = nu(z, rho);
    return same ? a * a : a * nu2(z, rho);
  });
  return integral / (rho * rho * rho * rho);
}

double rho_norm(const BallMass& nu, double rho, const SmoothReference& m, int quadrature_n) {
  return std::sqrt(rho_inner(nu, nu, rho, m, quadrature_n));
}

double variable_rho_norm_sq(const BallMass& nu, const std::function<double(const TorusPoint&)>& radius,
                            const SmoothReference& m, int quadrature_n) {
  return lattice_integral(quadrature_n, m, [&](const TorusPoint& z) {
    const double r = radius(z);
    const double a = nu(z, r);
    return a * a / (r * r * r * r);
  });
}

double lens_area(double d, double rho) {
  if (d >= 2.0 * rho) return 0.0;
  return 2.0 * rho * rho * std::acos(d / (2.0 * rho)) - 0.5 * d * std::sqrt(4.0 * rho * rho - d * d);
}

double cloud_rho_inner(const PointCloudMeasure& nu, const PointCloudMeasure& nu2, double rho,
                       const LensOptions& options) {
  if (!(rho > 0.0 && rho < 0.25)) throw InvalidArgument("cloud_rho_inner: rho must be in (0, 1/4)");
  const bool same = &nu == &nu2;
  const bool drop_diag = same && options.exclude_diagonal;
  const std::size_t count = nu.size();
  const std::size_t chunk = 1024;
  const std::size_t tasks = (count + chunk - 1) / chunk;
  std::vector<double> partial(tasks, 0.0);
  parallel_for(tasks, [&](unsigned, std::size_t t) {
    double s = 0.0;
    const std::size_t end = std::min(count, (t + 1) * chunk);
    for (std::size_t a = t * chunk; a < end; ++a) {
      double row = 0.0;
      nu2.index().for_each_within(nu.points()[a], 2.0 * rho, [&](std::uint32_t b, const Vec2& d) {
        if (drop_diag && b == a) return;
        row += nu2.weights()[b] * lens_area(norm(d), rho);
      });
      s += nu.weights()[a] * row;
    }
    partial[t] = s;
  });
  double total = 0.0;
  for (double p : partial) total += p;
  if (drop_diag) {
    double w2 = 0.0;
    for (double w : nu.weights()) w2 += w * w;
    const double big = nu.total() * nu.total();
    if (big - w2 <= 0.0) return 0.0;
    total *= big / (big - w2);
  }
  return total / (rho * rho * rho * rho);
}

void summarize_curve(RhoNormCurve& c) {
  c.c1_fit = 0.0;
  c.max_halving_ratio = 0.0;
  const std::size_t k = c.rho.size();
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (c.rho[i] <= c.rho[j] && c.norm[i] > 0.0) c.c1_fit = std::max(c.c1_fit, c.norm[j] / c.norm[i]);
    }
    if (i + 1 < k && std::fabs(c.rho[i + 1] * 2.0 - c.rho[i]) <= 1e-12 * c.rho[i] && c.norm[i] > 0.0) {
      c.max_halving_ratio = std::max(c.max_halving_ratio, c.norm[i + 1] / c.norm[i]);
    }
  }
}

RhoNormCurve rho_norm_curve(const BallMass& nu, const std::vector<double>& scales, const SmoothReference& m,
                            int quadrature_n) {
  for (std::size_t i = 1; i < scales.size(); ++i) {
    if (!(scales[i] < scales[i - 1])) throw InvalidArgument("rho_norm_curve: scales must be descending");
  }
  RhoNormCurve c;
  for (double rho : scales) {
    c.rho.push_back(rho);
    c.norm.push_back(rho_norm(nu, rho, m, quadrature_n));
  }
  summarize_curve(c);
  return c;
}

double coarse_distance(const GridMeasure& a, const GridMeasure& b, int resolution) {
  const GridMeasure ca = a.coarse(resolution).normalized();
  const GridMeasure cb = b.coarse(resolution).normalized();
  double s = 0.0;
  for (std::size_t k = 0; k < ca.mass.size(); ++k) s += std::fabs(ca.mass[k] - cb.mass[k]);
  return 0.5 * s;
}

PointCloudMeasure convolve_power(const GeneratorLaw& law, int j, const PointCloudMeasure& nu, int words_per_point,
                                 std::uint64_t seed) {
  if (j < 0) throw InvalidArgument("convolve_power: j must be >= 0");
  if (words_per_point < 1) throw InvalidArgument("convolve_power: words_per_point must be >= 1");
  if (j == 0) return nu;
  const std::size_t count = nu.size();
  const std::size_t per = static_cast<std::size_t>(words_per_point);
  std::vector<TorusPoint> pts(count * per);
  std::vector<double> wts(count * per);
  parallel_for(count, [&](unsigned, std::size_t k) {
    for (std::size_t r = 0; r < per; ++r) {
      const Word w = sample_word(law, static_cast<std::size_t>(j), derive_seed(seed, k * per + r));
      pts[k * per + r] = compose_apply(law, w, nu.points()[k]);
      wts[k * per + r] = nu.weights()[k] / words_per_point;
    }
  });
  return PointCloudMeasure(std::move(pts), std::move(wts));
}

GridMeasure OrbitHistogram::to_measure() const {
  GridMeasure g(n);
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) return g;
  for (std::size_t k = 0; k < counts.size(); ++k) g.mass[k] = static_cast<double>(counts[k]) / total;
  return g;
}

OrbitHistogram accumulate_orbits(const GeneratorLaw& law, std::size_t tasks,
                                 const std::function<TorusPoint(std::size_t, CounterRng&)>& start, int first,
                                 int last, std::uint64_t seed, int resolution) {
  law.validate();
  if (resolution < 1) throw InvalidArgument("histogram resolution must be >= 1");
  const std::size_t cells = static_cast<std::size_t>(resolution) * resolution;
  const unsigned workers = worker_count(tasks);
  std::vector<std::vector<std::uint64_t>> local(workers, std::vector<std::uint64_t>(cells, 0));
  parallel_for(tasks, [&](unsigned worker, std::size_t t) {
    CounterRng rng(derive_seed(seed, t));
    TorusPoint p = start(t, rng);
    auto& hist = local[worker];
    for (int j = 0; j <= last; ++j) {
      if (j > 0) p = law.maps[law.sample_index(rng.uniform())].apply(p);
      if (j >= first) {
        const int i = std::min(resolution - 1, static_cast<int>(p.x * resolution));
        const int k = std::min(resolution - 1, static_cast<int>(p.y * resolution));
        ++hist[static_cast<std::size_t>(i) * resolution + k];
      }
    }
  });
  OrbitHistogram h;
  h.n = resolution;
  h.counts.assign(cells, 0);
  for (const auto& hist : local) {
    for (std::size_t c = 0; c < cells; ++c) h.counts[c] += hist[c];
  }
  return h;
}

GridMeasure estimate_stationary(const GeneratorLaw& law, const TorusPoint& x0, int n, int words, int burn_in,
                                std::uint64_t seed, int resolution) {
  if (!(n > burn_in) || burn_in < 0) throw InvalidArgument("estimate_stationary: need n > burn_in >= 0");
  if (words < 1) throw InvalidArgument("estimate_stationary: words must be >= 1");
  return accumulate_orbits(
             law, static_cast<std::size_t>(words), [&](std::size_t, CounterRng&) { return x0; }, burn_in + 1, n,
             seed, resolution)
      .to_measure();
}

}  // namespace torus_lab
