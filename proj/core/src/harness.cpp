#include "torus_lab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "torus_lab/errors.hpp"
#include "torus_lab/format.hpp"
#include "torus_lab/parallel.hpp"

namespace torus_lab {
namespace {

void report(KeyEstimateResult& r, bool strict) {
  r.hypotheses_met = r.violations.empty();
  if (strict && !r.hypotheses_met) {
    std::string msg = "key estimate hypotheses violated:";
    for (const auto& v : r.violations) msg += " " + v + ";";
    throw HypothesisViolated(msg);
  }
}

double family_norm_sq(const CurveFamily& family, double rho, const HarnessOptions& options) {
  const PointCloudMeasure cloud = discretize_family(family, rho / options.atoms_per_radius, 2.0 * rho);
  return cloud_rho_inner(cloud, cloud, rho);
}

double sample_norm_sq(const PointCloudMeasure& cloud, double rho) {
  LensOptions lens;
  lens.exclude_diagonal = true;
  return cloud_rho_inner(cloud, cloud, rho, lens);
}

}  // namespace

double family_mass(const CurveFamily& family) {
  double m = 0.0;
  for (const auto& c : family) m += c.mass();
  return m;
}

CurveFamily random_family(const Cone& cone_u, const FamilyOptions& o, std::uint64_t seed) {
  if (o.min_curves < 1 || o.max_curves < o.min_curves) throw InvalidArgument("random_family: bad curve counts");
  if (!(o.min_length > 0.0) || o.max_length < o.min_length) throw InvalidArgument("random_family: bad lengths");
  CounterRng rng(seed);
  const int count = o.min_curves + static_cast<int>(rng.uniform() * (o.max_curves - o.min_curves + 1));
  std::vector<double> share(static_cast<std::size_t>(count));
  double total = 0.0;
  for (double& s : share) {
    s = 0.5 + rng.uniform();
    total += s;
  }
  CurveFamily family;
  for (int k = 0; k < count; ++k) {
    const Vec2 p{rng.uniform(), rng.uniform()};
    const Vec2 u = cone_u.direction(0.1 + 0.8 * rng.uniform());
    const double len = o.min_length + (o.max_length - o.min_length) * rng.uniform();
    const double slope = o.log_slope * (2.0 * rng.uniform() - 1.0);
    family.push_back(CurveJet::segment(p, u, len, o.spacing, o.total_mass * share[k] / total, slope));
  }
  return family;
}

PointCloudMeasure sample_family(const CurveFamily& family, std::size_t count, std::uint64_t seed,
                                double typical_radius) {
  if (family.empty() || count == 0) throw InvalidArgument("sample_family: empty family or sample");
  std::vector<double> cdf(family.size() + 1, 0.0);
  for (std::size_t k = 0; k < family.size(); ++k) cdf[k + 1] = cdf[k] + family[k].mass();
  const double mass = cdf.back();
  // Multinomial split of the sample across curves, then per-curve draws.
  std::vector<std::size_t> per(family.size(), 0);
  CounterRng rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    const double u = rng.uniform() * mass;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    per[std::min(family.size() - 1, static_cast<std::size_t>(std::max<long>(0, it - cdf.begin() - 1)))]++;
  }
  std::vector<TorusPoint> pts;
  pts.reserve(count);
  for (std::size_t k = 0; k < family.size(); ++k) {
    if (per[k] == 0) continue;
    const PointCloudMeasure c = sample_curve_measure(family[k], per[k], derive_seed(seed, k + 1));
    pts.insert(pts.end(), c.points().begin(), c.points().end());
  }
  return PointCloudMeasure(std::move(pts), std::vector<double>(count, mass / count), typical_radius);
}

PointCloudMeasure discretize_family(const CurveFamily& family, double h, double typical_radius) {
  if (!(h > 0.0)) throw InvalidArgument("discretize_family: spacing must be positive");
  std::vector<TorusPoint> pts;
  std::vector<double> wts;
  for (const auto& curve : family) {
    std::vector<int> pieces(curve.size() - 1);
    const std::vector<double> s = curve.arclength();
    for (std::size_t k = 0; k + 1 < curve.size(); ++k) {
      pieces[k] = std::max(1, static_cast<int>(std::ceil((s[k + 1] - s[k]) / h)));
    }
    CurveJet fine = refine_curve(curve, pieces);
    fine.set_mass(curve.mass());
    for (std::size_t k = 0; k + 1 < fine.size(); ++k) {
      const double w = 0.5 *
                       (std::exp(fine.log_density[k]) * norm(fine.jets[k].d1) +
                        std::exp(fine.log_density[k + 1]) * norm(fine.jets[k + 1].d1)) *
                       (fine.t[k + 1] - fine.t[k]);
      if (w <= 0.0) continue;
      pts.emplace_back(fine.segment_position(k, 0.5));
      wts.push_back(w);
    }
  }
  return PointCloudMeasure(std::move(pts), std::move(wts), typical_radius);
}

PointCloudMeasure push_cloud(const GeneratorLaw& law, const PointCloudMeasure& cloud, const Word& word,
                             double typical_radius) {
  std::vector<TorusPoint> pts(cloud.size());
  const std::size_t chunk = 4096;
  parallel_for((cloud.size() + chunk - 1) / chunk, [&](unsigned, std::size_t t) {
    const std::size_t end = std::min(cloud.size(), (t + 1) * chunk);
    for (std::size_t i = t * chunk; i < end; ++i) pts[i] = compose_apply(law, word, cloud.points()[i]);
  });
  return PointCloudMeasure(std::move(pts), cloud.weights(), typical_radius);
}

double epsilon_budget(const CertReport& cert, double alpha, double eta, double theta) {
  if (!(alpha > 0.0) || !(eta > 0.0 && eta < 1.0) || !(theta > 0.0)) {
    throw InvalidArgument("epsilon_budget: need alpha > 0, eta in (0, 1), theta > 0");
  }
  double e = std::min(1.0, 0.5 * (1.0 + cert.lambda_u_minus));
  e = std::min(e, -alpha * std::log(eta) / 8.0);
  e = std::min(e, -alpha * theta * std::log(cert.lambda_s_minus) / 10.0);
  e = std::min(e, -alpha * std::log(cert.lambda_s_plus / cert.lambda_u_minus) / 10.0);
  return 0.99 * e;
}

KeyEstimateResult key_estimate_check(const GeneratorLaw& law, const CertReport& cert, const CurveFamily& family,
                                     const Word& word, int n, double rho, const HarnessOptions& options,
                                     std::uint64_t seed) {
  if (family.empty()) throw InvalidArgument("key_estimate_check: empty family");
  if (n < 0 || word.size() != static_cast<std::size_t>(n)) {
    throw InvalidArgument("key_estimate_check: word must have n letters");
  }
  KeyEstimateResult r;
  r.n = n;
  r.rho = rho;
  r.rho_rhs = options.c9 * std::pow(cert.lambda_s_plus, -n) * rho;
  if (!(rho > 0.0 && r.rho_rhs < 0.25)) {
    throw InvalidArgument("key_estimate_check: need 0 < rho and C9 lambda_{s,+}^-n rho < 1/4");
  }

  const double min_len = 2.0 * options.c3 * std::pow(cert.lambda_s_minus, -n) * rho;
  for (std::size_t k = 0; k < family.size(); ++k) {
    if (family[k].length() < min_len) {
      r.violations.push_back("curve " + std::to_string(k) + " shorter than 2 C3 lambda_s^-n rho = " + fmt(min_len));
    }
  }
  const double rho_max = std::pow(cert.lambda_s_minus, n) * options.rho_prime;
  if (!(rho < rho_max)) r.violations.push_back("rho >= lambda_s^n rho' = " + fmt(rho_max));
  report(r, options.strict);

  const PointCloudMeasure samples = sample_family(family, options.samples, seed, 2.0 * rho);
  r.lhs = sample_norm_sq(push_cloud(law, samples, word, 2.0 * rho), rho);
  r.norm_sq = family_norm_sq(family, r.rho_rhs, options);
  r.factor = std::exp(6.0 * options.epsilon * n);
  r.rhs = r.factor * r.norm_sq;
  r.ratio = r.rhs > 0.0 ? r.lhs / r.rhs : 0.0;
  r.passed = r.lhs <= r.rhs;
  return r;
}

double fit_c9(const GeneratorLaw& law, const CertReport& cert, const std::vector<CurveFamily>& families,
              const std::vector<Word>& words, int n, double rho, const HarnessOptions& options, std::uint64_t seed,
              double safety) {
  if (families.empty() || families.size() != words.size()) {
    throw InvalidArgument("fit_c9: need one word per calibration family");
  }
  const double scale = std::pow(cert.lambda_s_plus, -n) * rho;
  const double r_cap = 0.24;
  double best = r_cap / scale;
  for (std::size_t k = 0; k < families.size(); ++k) {
    const PointCloudMeasure samples = sample_family(families[k], options.samples, derive_seed(seed, k), 2.0 * rho);
    const double lhs = sample_norm_sq(push_cloud(law, samples, words[k], 2.0 * rho), rho);
    const double factor = std::exp(6.0 * options.epsilon * n);
    auto passes = [&](double r) { return lhs <= factor * family_norm_sq(families[k], r, options); };
    // The family norm decreases with the radius: bisect for the largest passing radius.
    double lo = rho;
    double hi = r_cap;
    if (passes(hi)) continue;
    if (!passes(lo)) {
      best = std::min(best, rho / scale);
      continue;
    }
    for (int it = 0; it < 20; ++it) {
      const double mid = std::sqrt(lo * hi);
      (passes(mid) ? lo : hi) = mid;
    }
    best = std::min(best, lo / scale);
  }
  return safety * best;
}

LasotaYorkeResult lasota_yorke_check(const GeneratorLaw& law, const CertReport& cert, const CurveFamily& family,
                                     const std::vector<int>& ns, double rho, const HarnessOptions& options,
                                     std::uint64_t seed) {
  if (ns.empty()) throw InvalidArgument("lasota_yorke_check: no n values");
  LasotaYorkeResult r;
  r.ns = ns;
  r.rho = rho;
  r.mass = family_mass(family);
  r.norm0_sq = family_norm_sq(family, rho, options);
  const PointCloudMeasure samples = sample_family(family, options.samples, seed, 2.0 * rho);
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const PointCloudMeasure pushed = convolve_power(law, ns[i], samples, 1, derive_seed(seed, 1000 + i));
    const PointCloudMeasure indexed(pushed.points(), pushed.weights(), 2.0 * rho);
    r.lhs.push_back(sample_norm_sq(indexed, rho));
  }
  const std::size_t last = static_cast<std::size_t>(std::max_element(ns.begin(), ns.end()) - ns.begin());
  const double c = r.lhs[last];
  r.c_fit = c / (r.mass * r.mass);
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (ns[i] < 1) continue;
    const double excess = std::max(0.0, r.lhs[i] - c);
    r.lambda_hat = std::max(r.lambda_hat, std::pow(excess / r.norm0_sq, 1.0 / ns[i]));
  }
  r.contracting = r.lambda_hat < 1.0;

  // Admissible window at the largest n.
  const int n = ns[last];
  const double first = options.c10 * std::pow(options.lambda, n) * options.rho1 / 10.0;
  const double c3 = options.c3;
  const double second = std::pow(cert.lambda_s_minus, 3 * n) * options.rho1 /
                        (c3 * c3 * c3 * std::pow(cert.lambda_u_plus, 2 * n));
  r.window = std::min(first, second);
  r.window_met = rho < r.window;
  return r;
}

std::vector<CesaroPoint> cesaro_norm_bound(const GeneratorLaw& law, const CurveFamily& family,
                                           const std::vector<int>& checkpoints, double rho,
                                           const HarnessOptions& options, std::uint64_t seed) {
  law.validate();
  const PointCloudMeasure base = sample_family(family, options.samples, seed, 2.0 * rho);
  std::vector<CesaroPoint> out;
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    const int m = checkpoints[c];
    if (m < 1) throw InvalidArgument("cesaro_norm_bound: checkpoints must be >= 1");
    if (m == 1) {
      out.push_back({1, family_norm_sq(family, rho, options)});
      continue;
    }
    std::vector<TorusPoint> pts(base.size());
    const std::uint64_t stream = derive_seed(seed, 7919 + c);
    const std::size_t chunk = 1024;
    parallel_for((base.size() + chunk - 1) / chunk, [&](unsigned, std::size_t t) {
      const std::size_t end = std::min(base.size(), (t + 1) * chunk);
      for (std::size_t i = t * chunk; i < end; ++i) {
        CounterRng rng(derive_seed(stream, i));
        const int j = std::min(m - 1, static_cast<int>(rng.uniform() * m));
        TorusPoint p = base.points()[i];
        for (int k = 0; k < j; ++k) p = law.maps[law.sample_index(rng.uniform())].apply(p);
        pts[i] = p;
      }
    });
    out.push_back({m, sample_norm_sq(PointCloudMeasure(std::move(pts), base.weights(), 2.0 * rho), rho)});
  }
  return out;
}

double fit_scale_constant(const std::vector<RhoNormCurve>& curves) {
  double c = 0.0;
  for (const auto& curve : curves) c = std::max(c, curve.c1_fit);
  return c;
}

std::string key_estimate_csv(const std::vector<KeyEstimateResult>& rows) {
  std::ostringstream os;
  os << "n,rho,lhs,rhs,pass\n";
  for (const auto& r : rows) os << r.n << ',' << fmt(r.rho) << ',' << fmt(r.lhs) << ',' << fmt(r.rhs) << ',' << fmt(r.passed) << '\n';
  return os.str();
}

std::string lasota_yorke_csv(const LasotaYorkeResult& result) {
  std::ostringstream os;
  os << "n,rho,lhs,rhs,pass\n";
  for (std::size_t i = 0; i < result.ns.size(); ++i) {
    const int n = result.ns[i];
    const double rhs = std::pow(result.lambda_hat, n) * result.norm0_sq + result.c_fit * result.mass * result.mass;
    os << n << ',' << fmt(result.rho) << ',' << fmt(result.lhs[i]) << ',' << fmt(rhs) << ','
       << fmt(result.lhs[i] <= rhs * (1.0 + 1e-12)) << '\n';
  }
  return os.str();
}

std::string cesaro_csv(const std::vector<CesaroPoint>& points) {
  std::ostringstream os;
  os << "m,norm_sq\n";
  for (const auto& p : points) os << p.m << ',' << fmt(p.value) << '\n';
  return os.str();
}

}  // namespace torus_lab
