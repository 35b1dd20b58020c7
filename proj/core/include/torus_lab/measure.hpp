#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "torus_lab/random_system.hpp"
#include "torus_lab/spatial_index.hpp"
#include "torus_lab/torus.hpp"
#include "torus_lab/torus_map.hpp"

namespace torus_lab {

/// Histogram on the n x n grid; cell (i, j) covers
/// [i/n, (i+1)/n) x [j/n, (j+1)/n) and lives at mass[i * n + j].
struct GridMeasure {
  int n = 0;
  std::vector<double> mass;

  GridMeasure() = default;
  explicit GridMeasure(int n_in) : n(n_in), mass(static_cast<std::size_t>(n_in) * n_in, 0.0) {}

  /// Lebesgue with the given total mass.
  static GridMeasure uniform(int n, double total = 1.0);

  double total() const;
  double& at(int i, int j) { return mass[static_cast<std::size_t>(i) * n + j]; }
  double at(int i, int j) const { return mass[static_cast<std::size_t>(i) * n + j]; }
  int cell_index(const TorusPoint& p) const;
  void deposit(const TorusPoint& p, double w) { mass[cell_index(p)] += w; }
  /// Same measure scaled to total mass 1 (zero measure stays zero).
  GridMeasure normalized() const;
  /// Coarse-grained to resolution r; cells go to the coarse cell holding
  /// their center.
  GridMeasure coarse(int r) const;
  TorusPoint center(int i, int j) const { return {(i + 0.5) / n, (j + 0.5) / n}; }
};

/// Finite weighted point set with a uniform-cell spatial index.
class PointCloudMeasure {
 public:
  PointCloudMeasure() = default;
  PointCloudMeasure(std::vector<TorusPoint> points, std::vector<double> weights, double typical_radius = 1.0 / 64);

  std::size_t size() const { return points_.size(); }
  const std::vector<TorusPoint>& points() const { return points_; }
  const std::vector<double>& weights() const { return weights_; }
  double total() const { return total_; }
  const SpatialIndex& index() const { return index_; }

  /// Exact weighted count of points with d(z, p) < rho.
  double ball_mass(const TorusPoint& z, double rho) const;
  /// Scaled copy (weights times c).
  PointCloudMeasure scaled(double c) const;
  GridMeasure to_grid(int n) const;

 private:
  std::vector<TorusPoint> points_;
  std::vector<double> weights_;
  double total_ = 0.0;
  SpatialIndex index_;
};

/// Density of the smooth reference m against Lebesgue:
/// 1 + sum a * sin(2 pi k.x + phase) with sum |a| < 1.
struct SmoothReference {
  struct Term {
    std::array<int, 2> k{0, 0};
    double a = 0.0;
    double phase = 0.0;
  };
  std::vector<Term> terms;

  static SmoothReference lebesgue() { return {}; }
  double density(const TorusPoint& p) const;
  /// C0 >= 1 with C0^-1 <= dm/dLeb <= C0.
  double c0() const;
  bool is_lebesgue() const { return terms.empty(); }
  /// Throws InvalidArgument if the density can vanish or a term has k = 0.
  void validate() const;
};

/// Read-only ball-mass oracle built once from a measure.
class BallMass {
 public:
  virtual ~BallMass() = default;
  virtual double operator()(const TorusPoint& z, double rho) const = 0;
  virtual double total() const = 0;
};

/// Grid ball masses by cell centers with per-column prefix sums:
/// O(rho * n) per query for any center z.
class GridBallMass : public BallMass {
 public:
  explicit GridBallMass(const GridMeasure& m);
  /// Throws ResolutionTooCoarse if the cell size exceeds rho / 8 or
  /// InvalidArgument unless 0 < rho < 1/4.
  double operator()(const TorusPoint& z, double rho) const override;
  double total() const override { return total_; }

 private:
  int n_;
  double total_;
  std::vector<double> prefix_;  // per column i: prefix over j, n + 1 entries
};

class CloudBallMass : public BallMass {
 public:
  explicit CloudBallMass(const PointCloudMeasure& m) : m_(m) {}
  double operator()(const TorusPoint& z, double rho) const override;
  double total() const override { return m_.total(); }

 private:
  const PointCloudMeasure& m_;
};

/// Exact ball mass for the zero measure.
class ZeroBallMass : public BallMass {
 public:
  double operator()(const TorusPoint&, double) const override { return 0.0; }
  double total() const override { return 0.0; }
};

/// rho^-4 * integral nu(B(z,rho)) nu'(B(z,rho)) dm(z) on the
/// quadrature_n x quadrature_n lattice of cell centers.
double rho_inner(const BallMass& nu, const BallMass& nu2, double rho, const SmoothReference& m, int quadrature_n);
double rho_norm(const BallMass& nu, double rho, const SmoothReference& m, int quadrature_n);

/// Variable radius: integral nu(B(z, r(z)))^2 / r(z)^4 dm(z) (squared norm).
double variable_rho_norm_sq(const BallMass& nu, const std::function<double(const TorusPoint&)>& radius,
                            const SmoothReference& m, int quadrature_n);

/// Area of B(a, rho) cap B(b, rho) for centers at distance d (flat plane).
double lens_area(double d, double rho);

struct LensOptions {
  /// Drop a == b pairs and rescale to the unbiased U-statistic, for clouds
  /// that are iid samples of a measure.
  bool exclude_diagonal = false;
};

/// Exact <nu, nu'>_rho for point clouds when m is Lebesgue:
/// rho^-4 sum_{a,b} w_a w'_b |B(a,rho) cap B(b,rho)|. Pass the same cloud
/// twice for the squared norm.
double cloud_rho_inner(const PointCloudMeasure& nu, const PointCloudMeasure& nu2, double rho,
                       const LensOptions& options = {});

struct RhoNormCurve {
  std::vector<double> rho;
  std::vector<double> norm;
  /// max over rho_i <= rho_j of norm_j / norm_i.
  double c1_fit = 0.0;
  /// max of norm(rho/2) / norm(rho) over consecutive scales.
  double max_halving_ratio = 0.0;
};

/// Norms at the given (descending) scales.
RhoNormCurve rho_norm_curve(const BallMass& nu, const std::vector<double>& scales, const SmoothReference& m,
                            int quadrature_n);
/// Fills c1_fit and max_halving_ratio from rho / norm columns.
void summarize_curve(RhoNormCurve& curve);

/// Total-variation distance (1/2 L1) between normalized coarse-grainings.
double coarse_distance(const GridMeasure& a, const GridMeasure& b, int resolution);

/// Each atom pushed by words_per_point independent length-j words; the
/// atom's weight is split equally. Total mass is preserved.
PointCloudMeasure convolve_power(const GeneratorLaw& law, int j, const PointCloudMeasure& nu, int words_per_point,
                                 std::uint64_t seed);

/// Normalized histogram of f^j_w(x0), burn_in < j <= n, over `words`
/// independent words. Deterministic for any thread count.
GridMeasure estimate_stationary(const GeneratorLaw& law, const TorusPoint& x0, int n, int words, int burn_in,
                                std::uint64_t seed, int resolution);

/// Counts of orbit points, accumulated across workers.
struct OrbitHistogram {
  int n = 0;
  std::vector<std::uint64_t> counts;

  GridMeasure to_measure() const;
};

/// Generic orbit accumulation: start(task, rng) gives x_0, then `last`
/// random letters are applied and x_j is deposited for first <= j <= last.
OrbitHistogram accumulate_orbits(const GeneratorLaw& law, std::size_t tasks,
                                 const std::function<TorusPoint(std::size_t, CounterRng&)>& start, int first,
                                 int last, std::uint64_t seed, int resolution);

}  // namespace torus_lab
