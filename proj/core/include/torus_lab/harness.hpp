#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "torus_lab/certify.hpp"
#include "torus_lab/curve.hpp"
#include "torus_lab/measure.hpp"

namespace torus_lab {

/// Finite admissible measure: each curve carries its own mass.
using CurveFamily = std::vector<CurveJet>;

double family_mass(const CurveFamily& family);

struct FamilyOptions {
  int min_curves = 1;
  int max_curves = 4;
  double min_length = 0.1;
  double max_length = 0.3;
  double log_slope = 1.0;   // |d log rho / ds| drawn uniformly up to this
  double spacing = 1.0 / 512;
  double total_mass = 1.0;
};

/// Straight unstable segments with random base points, directions inside
/// the middle 80% of C^u, lengths and log-linear densities.
CurveFamily random_family(const Cone& cone_u, const FamilyOptions& options, std::uint64_t seed);

/// iid samples of the family measure; each weight is mass / count.
PointCloudMeasure sample_family(const CurveFamily& family, std::size_t count, std::uint64_t seed,
                                double typical_radius);

/// Deterministic cloud: one atom at the middle of every piece of arc length
/// at most h, weighted by the piece's mass.
PointCloudMeasure discretize_family(const CurveFamily& family, double h, double typical_radius);

/// Every atom pushed by the same word.
PointCloudMeasure push_cloud(const GeneratorLaw& law, const PointCloudMeasure& cloud, const Word& word,
                             double typical_radius);

/// Largest epsilon admitted by the perturbation budget
/// min{1, (1 + lambda_{u,-})/2, -alpha log(eta)/8, -alpha theta log(lambda_{s,-})/10,
///     -alpha log(lambda_{s,+}/lambda_{u,-})/10}, times 0.99 since the bound is strict.
double epsilon_budget(const CertReport& cert, double alpha, double eta, double theta);

struct HarnessOptions {
  double epsilon = 0.0;      // perturbation budget entering e^{6 eps n}
  double c9 = 1.0;           // rhs scale constant (fitted)
  double c3 = 1.0;           // length constant in the hypotheses (supplied, not computed)
  double rho_prime = 0.5;    // rho' in the hypotheses
  std::size_t samples = 100000;
  int atoms_per_radius = 32;  // atom spacing rho / this for deterministic norms
  bool strict = false;       // throw HypothesisViolated instead of flagging
  double c10 = 0.0;          // transversality constant, for the Lasota-Yorke window
  double lambda = 0.0;       // transversality rate, same
  double rho1 = 1.0 / 3;     // curve length floor rho_1 in the window
};

struct KeyEstimateResult {
  int n = 0;
  double rho = 0.0;
  double rho_rhs = 0.0;  // C9 lambda_{s,+}^-n rho
  double lhs = 0.0;      // |(f^n_w)_* nu0|^2_rho
  double norm_sq = 0.0;  // |nu0|^2 at rho_rhs
  double factor = 1.0;   // e^{6 eps n}
  double rhs = 0.0;
  double ratio = 0.0;    // lhs / rhs
  bool passed = false;
  bool hypotheses_met = true;
  std::vector<std::string> violations;
};

/// Both sides of |(f^n_w)_* nu0|^2_rho <= e^{6 eps n} |nu0|^2_{C9 lambda_{s,+}^-n rho}.
/// lhs: U-statistic over iid family samples pushed by the word; rhs: exact
/// lens sum over the discretized family.
KeyEstimateResult key_estimate_check(const GeneratorLaw& law, const CertReport& cert, const CurveFamily& family,
                                     const Word& word, int n, double rho, const HarnessOptions& options,
                                     std::uint64_t seed);

/// Largest C9 under which every calibration family passes, times `safety`,
/// capped so the rhs radius stays below 0.24.
double fit_c9(const GeneratorLaw& law, const CertReport& cert, const std::vector<CurveFamily>& families,
              const std::vector<Word>& words, int n, double rho, const HarnessOptions& options, std::uint64_t seed,
              double safety = 0.5);

struct LasotaYorkeResult {
  std::vector<int> ns;
  std::vector<double> lhs;  // |mu^{*n} * nu'|^2_rho
  double rho = 0.0;
  double norm0_sq = 0.0;    // |nu'|^2_rho
  double mass = 0.0;
  double lambda_hat = 0.0;
  double c_fit = 0.0;       // C in units of mass^2
  bool contracting = false; // lambda_hat < 1
  double window = 0.0;      // right end of the admissible rho window
  bool window_met = false;
};

/// Monte-Carlo |mu^{*n} * nu'|^2_rho over the given n, and the fit
/// C = lhs(n_max) / mass^2, lambda_hat = max_n ((lhs(n) - C mass^2)_+ / |nu'|^2)^{1/n}.
LasotaYorkeResult lasota_yorke_check(const GeneratorLaw& law, const CertReport& cert, const CurveFamily& family,
                                     const std::vector<int>& ns, double rho, const HarnessOptions& options,
                                     std::uint64_t seed);

struct CesaroPoint {
  int m = 0;
  double value = 0.0;  // |(1/m) sum_{i<m} mu^{*i} * nu'|^2_rho
};

/// m = 1 uses the discretized family; larger m use iid samples of the
/// Cesaro average (uniform time in [0, m), then a random word).
std::vector<CesaroPoint> cesaro_norm_bound(const GeneratorLaw& law, const CurveFamily& family,
                                           const std::vector<int>& checkpoints, double rho,
                                           const HarnessOptions& options, std::uint64_t seed);

/// max over curves of the scale comparison constant max_{rho <= delta} |nu|_delta / |nu|_rho.
double fit_scale_constant(const std::vector<RhoNormCurve>& curves);

std::string key_estimate_csv(const std::vector<KeyEstimateResult>& rows);
std::string lasota_yorke_csv(const LasotaYorkeResult& result);
std::string cesaro_csv(const std::vector<CesaroPoint>& points);

}  // namespace torus_lab
