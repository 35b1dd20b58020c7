#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <utility>

#include "config.hpp"
#include "torus_lab/certify.hpp"
#include "torus_lab/curve.hpp"
#include "torus_lab/equidistribution.hpp"
#include "torus_lab/errors.hpp"
#include "torus_lab/fit.hpp"
#include "torus_lab/format.hpp"
#include "torus_lab/harness.hpp"
#include "torus_lab/parallel.hpp"
#include "torus_lab/periodic.hpp"
#include "torus_lab/projective.hpp"
#include "torus_lab/random_system.hpp"

namespace torus_lab::cli {

namespace fs = std::filesystem;

namespace {

/// Ordered key=value record written as summary.txt.
class Summary {
 public:
  void add(const std::string& key, const std::string& value) { lines_ << key << '=' << value << '\n'; }
  void add(const std::string& key, double value) { add(key, fmt(value)); }
  void add(const std::string& key, bool value) { add(key, fmt(value)); }
  void add(const std::string& key, int value) { add(key, std::to_string(value)); }
  void raw(const std::string& text) { lines_ << text; }
  std::string str() const { return lines_.str(); }

 private:
  std::ostringstream lines_;
};

struct Context {
  const RunConfig& cfg;
  const fs::path& out;
  std::uint64_t seed;
  Summary summary;
};

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot write " + path.string());
  f << content;
  if (!f) throw Error("write failed for " + path.string());
}

std::string grid_csv(const GridMeasure& m) {
  std::ostringstream os;
  os << "i,j,mass\n";
  for (int i = 0; i < m.n; ++i) {
    for (int j = 0; j < m.n; ++j) os << i << ',' << j << ',' << fmt(m.at(i, j)) << '\n';
  }
  return os.str();
}

std::vector<double> dyadic_radii() {
  std::vector<double> radii;
  for (int k = 0; k <= 16; ++k) radii.push_back(1e-4 * std::pow(10.0, k / 4.0));
  return radii;
}

int cmd_certify(Context& c) {
  Section s(c.cfg.commands, "certify");
  s.check_known({"grid", "directions", "n_trunc", "rows"});
  const int grid = s.get_int("grid", c.cfg.grid, 64, 4096);
  CertifyOptions opts;
  opts.directions = s.get_int("directions", opts.directions, 8, 1 << 20);
  opts.n_trunc = s.get_int("n_trunc", opts.n_trunc, 1, 1000);
  opts.keep_rows = s.get_bool("rows", true);

  const auto [f, g] = c.cfg.pair();
  const CertReport r = certify(*f, *g, c.cfg.cones, grid, opts);
  if (opts.keep_rows) {
    std::ostringstream os;
    os << "i,j,u_ratio_min,u_ratio_max,s_ratio_min,s_ratio_max,unstable_angle,stable_angle\n";
    for (const auto& row : r.rows) {
      os << row.i << ',' << row.j << ',' << fmt(row.u_ratio_min) << ',' << fmt(row.u_ratio_max) << ','
         << fmt(row.s_ratio_min) << ',' << fmt(row.s_ratio_max) << ',' << fmt(row.unstable_angle) << ','
         << fmt(row.stable_angle) << '\n';
    }
    write_file(c.out / "certify_grid.csv", os.str());
  }
  c.summary.raw(format_report(r));
  return r.all_passed() ? kOk : kViolated;
}

GridMeasure stationary_from(const Context& c, const Section& s, int default_resolution) {
  const TorusPoint x0 = s.get_point("x0", {0.1234, 0.5678});
  const int n = s.get_int("n", 1000, 1, 100000000);
  const int words = s.get_int("words", 10000, 1, 100000000);
  const int burn_in = s.get_int("burn_in", 0, 0, n - 1);
  const int resolution = s.get_int("resolution", default_resolution, 1, 4096);
  return estimate_stationary(c.cfg.law(), x0, n, words, burn_in, c.seed, resolution);
}

int cmd_stationary(Context& c) {
  Section s(c.cfg.commands, "stationary");
  s.check_known({"x0", "n", "words", "burn_in", "resolution", "compare"});
  const int compare = s.get_int("compare", 64, 1, 4096);
  const GridMeasure m = stationary_from(c, s, 64);
  if (m.n % compare != 0) throw ConfigInvalid(s.field("compare") + ": must divide the resolution");
  write_file(c.out / "stationary.csv", grid_csv(m));
  c.summary.add("resolution", m.n);
  c.summary.add("compare_resolution", compare);
  c.summary.add("tv_uniform", coarse_distance(m, GridMeasure::uniform(m.n), compare));
  c.summary.add("min_cell_mass", min_cell_mass(m, compare));
  return kOk;
}

int cmd_rho_norm(Context& c) {
  Section s(c.cfg.commands, "rho-norm");
  s.check_known({"measure", "point", "x0", "n", "words", "burn_in", "resolution"});
  const std::string kind = s.get_string("measure", "uniform");
  GridMeasure m;
  if (kind == "uniform") {
    m = GridMeasure::uniform(s.get_int("resolution", 1024, 8, 4096));
  } else if (kind == "dirac") {
    m = GridMeasure(s.get_int("resolution", 1024, 8, 4096));
    m.deposit(s.get_point("point", {0.3, 0.7}), 1.0);
  } else if (kind == "stationary") {
    m = stationary_from(c, s, 1024);
  } else {
    throw ConfigInvalid(s.field("measure") + ": expected uniform, dirac or stationary");
  }
  const GridBallMass balls(m);
  RhoNormCurve curve = rho_norm_curve(balls, c.cfg.scales, c.cfg.reference, c.cfg.quadrature);
  std::ostringstream os;
  os << "rho,norm\n";
  for (std::size_t i = 0; i < curve.rho.size(); ++i) os << fmt(curve.rho[i]) << ',' << fmt(curve.norm[i]) << '\n';
  write_file(c.out / "rho_norm.csv", os.str());
  c.summary.add("measure", kind);
  c.summary.add("resolution", m.n);
  c.summary.add("c1_fit", curve.c1_fit);
  c.summary.add("max_halving_ratio", curve.max_halving_ratio);
  c.summary.add("norm_min", *std::min_element(curve.norm.begin(), curve.norm.end()));
  c.summary.add("norm_max", *std::max_element(curve.norm.begin(), curve.norm.end()));
  return kOk;
}

int cmd_curve_evolve(Context& c) {
  Section s(c.cfg.commands, "curve-evolve");
  s.check_known({"start", "direction", "length", "spacing", "n", "resample", "resample_every", "max_length",
                 "log_slope", "k0_probe", "k0_samples"});
  const TorusPoint start = s.get_point("start", {0.3, 0.4});
  const double dir = s.get_double("direction", 0.5, 0.0, 1.0);
  const double length = s.get_double("length", 0.1, 1e-6, 10.0);
  const double spacing = s.get_double("spacing", 1.0 / 512, 1e-6, 0.1);
  const int n = s.get_int("n", 30, 1, 100000);
  const bool resample = s.get_bool("resample", true);
  PushOptions po;
  po.resample_every = s.get_int("resample_every", po.resample_every, 1, 1000);
  po.max_length = s.get_double("max_length", 0.5, 0.0, 100.0);
  po.cone_u = c.cfg.cones.cone_u;
  const double log_slope = s.get_double("log_slope", 0.0, -1e3, 1e3);
  const int k0_probe = s.get_int("k0_probe", 5, 1, 64);
  const int k0_samples = s.get_int("k0_samples", 1000, 1, 10000000);

  const GeneratorLaw law = c.cfg.law();
  const KZero k0 = compute_k0(law, c.cfg.cones, k0_probe, k0_samples, derive_seed(c.seed, 1));
  const Word word = sample_word(law, static_cast<std::size_t>(n), derive_seed(c.seed, 2));
  CurveJet curve = CurveJet::segment(start.vec(), c.cfg.cones.cone_u.direction(dir), length, spacing, 1.0, log_slope);

  std::ostringstream os;
  os << "step,map,length,mass,max_curvature,log_lipschitz\n";
  os << 0 << ',' << -1 << ',' << fmt(curve.length()) << ',' << fmt(curve.mass()) << ','
     << fmt(curve.max_abs_curvature()) << ',' << fmt(curve.log_density_lipschitz()) << '\n';
  double max_curvature = 0.0;
  for (int step = 0; step < n; step += po.resample_every) {
    const int block = std::min(po.resample_every, n - step);
    Word part{{word.indices.begin() + step, word.indices.begin() + step + block}, word.seed};
    curve = push_curve(law, curve, part, resample, po);
    max_curvature = std::max(max_curvature, curve.max_abs_curvature());
    os << step + block << ',' << part.indices.back() << ',' << fmt(curve.length()) << ',' << fmt(curve.mass())
       << ',' << fmt(curve.max_abs_curvature()) << ',' << fmt(curve.log_density_lipschitz()) << '\n';
  }
  write_file(c.out / "curve_evolution.csv", os.str());
  write_file(c.out / "curve.csv", curve_csv(curve));
  const bool linear = std::all_of(law.maps.begin(), law.maps.end(), [](const TorusMap& m) { return m.is_linear(); });
  const double bound = linear ? 1e-9 : k0.k0;
  c.summary.add("k0", k0.k0);
  c.summary.add("k0_a", k0.a);
  c.summary.add("k0_b", k0.b);
  c.summary.add("linear", linear);
  c.summary.add("max_curvature", max_curvature);
  c.summary.add("curvature_bound", bound);
  c.summary.add("final_length", curve.length());
  c.summary.add("final_mass", curve.mass());
  c.summary.add("final_log_lipschitz", curve.log_density_lipschitz());
  const bool ok = max_curvature <= bound;
  c.summary.add("curvature_ok", ok);
  return ok ? kOk : kViolated;
}

int cmd_key_estimate(Context& c) {
  Section s(c.cfg.commands, "key-estimate");
  s.check_known({"n", "rho_factor", "families", "calibration", "samples", "alpha", "theta", "cert_grid", "strict",
                 "c3", "safety"});
  const int n = s.get_int("n", 20, 1, 200);
  const double rho_factor = s.get_double("rho_factor", 0.2, 1e-6, 1e6);
  const int families = s.get_int("families", 10, 1, 100000);
  const int calibration = s.get_int("calibration", 5, 1, 100000);
  const double alpha = s.get_double("alpha", 0.2, 1e-6, 1.0);
  const double theta = s.get_double("theta", 1.0, 1e-6, 1.0);
  const double safety = s.get_double("safety", 0.5, 1e-6, 1.0);
  const int cert_grid = s.get_int("cert_grid", 128, 64, 4096);
  HarnessOptions ho;
  ho.samples = static_cast<std::size_t>(s.get_int("samples", 100000, 100, 100000000));
  ho.strict = s.get_bool("strict", false);
  ho.c3 = s.get_double("c3", 1.0, 1e-9, 1e9);

  const GeneratorLaw law = c.cfg.law();
  const auto [f, g] = c.cfg.pair();
  const CertReport cert = certify(*f, *g, c.cfg.cones, cert_grid);
  ho.epsilon = epsilon_budget(cert, alpha, cert.contraction_rate(), theta);
  const double rho = rho_factor * std::pow(cert.lambda_s_plus, n);

  std::vector<CurveFamily> cal;
  std::vector<Word> cal_words;
  for (int k = 0; k < calibration; ++k) {
    cal.push_back(random_family(c.cfg.cones.cone_u, {}, derive_seed(derive_seed(c.seed, 1), k)));
    cal_words.push_back(sample_word(law, n, derive_seed(derive_seed(c.seed, 2), k)));
  }
  ho.c9 = fit_c9(law, cert, cal, cal_words, n, rho, ho, derive_seed(c.seed, 3), safety);

  std::vector<KeyEstimateResult> rows;
  int passed = 0;
  int hypotheses = 0;
  double worst = 0.0;
  for (int k = 0; k < families; ++k) {
    const CurveFamily fam = random_family(c.cfg.cones.cone_u, {}, derive_seed(derive_seed(c.seed, 4), k));
    const Word w = sample_word(law, n, derive_seed(derive_seed(c.seed, 5), k));
    rows.push_back(key_estimate_check(law, cert, fam, w, n, rho, ho, derive_seed(derive_seed(c.seed, 6), k)));
    passed += rows.back().passed ? 1 : 0;
    hypotheses += rows.back().hypotheses_met ? 1 : 0;
    worst = std::max(worst, rows.back().ratio);
  }
  write_file(c.out / "key_estimate.csv", key_estimate_csv(rows));
  c.summary.add("n", n);
  c.summary.add("rho", rho);
  c.summary.add("epsilon", ho.epsilon);
  c.summary.add("c9", ho.c9);
  c.summary.add("families", families);
  c.summary.add("passed", passed);
  c.summary.add("hypotheses_met", hypotheses);
  c.summary.add("worst_ratio", worst);
  for (const auto& v : rows.empty() ? std::vector<std::string>{} : rows.front().violations) {
    c.summary.add("violation", v);
  }
  return passed == families ? kOk : kViolated;
}

int cmd_lasota_yorke(Context& c) {
  Section s(c.cfg.commands, "lasota-yorke");
  s.check_known({"ns", "rho", "samples", "cert_grid", "holder_pairs", "cesaro", "cesaro_rho", "cesaro_samples",
                 "single_curve"});
  const std::vector<int> ns = s.get_ints("ns", {10, 15, 20}, 1, 1000);
  const double rho = s.get_double("rho", 1.0 / 64, 1e-6, 0.24);
  const int cert_grid = s.get_int("cert_grid", 128, 64, 4096);
  const int holder_pairs = s.get_int("holder_pairs", 200, 2, 1000000);
  const std::vector<int> cesaro = s.get_ints("cesaro", {}, 1, 100000);
  const double cesaro_rho = s.get_double("cesaro_rho", 1.0 / 16, 1e-6, 0.24);
  HarnessOptions ho;
  ho.samples = static_cast<std::size_t>(s.get_int("samples", 50000, 100, 100000000));
  HarnessOptions co;
  co.samples = static_cast<std::size_t>(s.get_int("cesaro_samples", 20000, 100, 100000000));
  FamilyOptions fo;
  if (s.get_bool("single_curve", false)) fo.min_curves = fo.max_curves = 1;

  const GeneratorLaw law = c.cfg.law();
  const auto [f, g] = c.cfg.pair();
  const CertReport cert = certify(*f, *g, c.cfg.cones, cert_grid);
  const DirectionContext dctx = DirectionContext::from(c.cfg.cones, cert);
  const HolderFieldFit hf = fit_unstable_holder(law, dctx, holder_pairs, 30, derive_seed(c.seed, 1));
  const TransversalityContext tctx = TransversalityContext::from(c.cfg.cones, cert, hf);
  ho.c10 = tctx.c10;
  ho.lambda = tctx.lambda;

  const CurveFamily fam = random_family(c.cfg.cones.cone_u, fo, derive_seed(c.seed, 2));
  const LasotaYorkeResult ly = lasota_yorke_check(law, cert, fam, ns, rho, ho, derive_seed(c.seed, 3));
  write_file(c.out / "lasota_yorke.csv", lasota_yorke_csv(ly));
  c.summary.add("rho", rho);
  c.summary.add("mass", ly.mass);
  c.summary.add("norm0_sq", ly.norm0_sq);
  c.summary.add("c_fit", ly.c_fit);
  c.summary.add("lambda_hat", ly.lambda_hat);
  c.summary.add("contracting", ly.contracting);
  c.summary.add("window", ly.window);
  c.summary.add("window_met", ly.window_met);
  if (!cesaro.empty()) {
    const auto points = cesaro_norm_bound(law, fam, cesaro, cesaro_rho, co, derive_seed(c.seed, 4));
    write_file(c.out / "cesaro.csv", cesaro_csv(points));
    c.summary.add("cesaro_rho", cesaro_rho);
    c.summary.add("cesaro_last", points.back().value);
    c.summary.add("mass_sq_pi_sq", kPi * kPi * family_mass(fam) * family_mass(fam));
  }
  return ly.contracting ? kOk : kViolated;
}

int cmd_holder(Context& c) {
  Section s(c.cfg.commands, "holder");
  s.check_known({"ns", "words", "x", "write_fiber"});
  const std::vector<int> ns = s.get_ints("ns", {12, 16}, 1, 200);
  const int words = s.get_int("words", 100000, 1, 100000000);
  const TorusPoint x = s.get_point("x", {0.3, 0.7});
  const bool write_fiber = s.get_bool("write_fiber", false);

  const GeneratorLaw law = c.cfg.law();
  const FiberMeasure seed = FiberMeasure::dirac({0.0, 0.0}, c.cfg.cones.cone_u.center());
  const std::vector<double> radii = dyadic_radii();
  bool any_degenerate = false;
  std::vector<double> alphas;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const int n = ns[i];
    const FiberMeasure fb = push_fiber(law, seed, n, words, x, derive_seed(c.seed, i));
    const HolderProfile hp = holder_profile(fb, radii, words);
    const std::string tag = std::to_string(n);
    write_file(c.out / ("holder_profile_n" + tag + ".csv"), profile_csv(hp));
    if (write_fiber) write_file(c.out / ("fiber_n" + tag + ".csv"), fiber_csv(fb));
    c.summary.add("alpha_n" + tag, hp.alpha);
    c.summary.add("r2_n" + tag, hp.fit.r2);
    c.summary.add("floor_radius_n" + tag, hp.floor_radius);
    c.summary.add("degenerate_n" + tag, hp.degenerate);
    any_degenerate = any_degenerate || hp.degenerate;
    alphas.push_back(hp.alpha);
  }
  if (alphas.size() >= 2 && !any_degenerate) {
    const auto [lo, hi] = std::minmax_element(alphas.begin(), alphas.end());
    c.summary.add("alpha_spread", (*hi - *lo) / *hi);
  }
  c.summary.add("degenerate", any_degenerate);
  return kOk;
}

int cmd_transversality(Context& c) {
  Section s(c.cfg.commands, "transversality");
  s.check_known({"n_min", "n_max", "trials", "delta", "point", "holder_pairs", "cert_grid"});
  const int n_min = s.get_int("n_min", 4, 1, 200);
  const int n_max = s.get_int("n_max", 14, n_min, 200);
  const int trials = s.get_int("trials", 4000, 1, 100000000);
  const double delta = s.get_double("delta", 0.0, 0.0, 10.0);
  const TorusPoint p = s.get_point("point", {0.3, 0.7});
  const int holder_pairs = s.get_int("holder_pairs", 1000, 2, 1000000);
  const int cert_grid = s.get_int("cert_grid", 64, 64, 4096);

  const GeneratorLaw law = c.cfg.law();
  const auto [f, g] = c.cfg.pair();
  const CertReport cert = certify(*f, *g, c.cfg.cones, cert_grid);
  const DirectionContext dctx = DirectionContext::from(c.cfg.cones, cert);
  const HolderFieldFit hf = fit_unstable_holder(law, dctx, holder_pairs, 30, derive_seed(c.seed, 1));
  const TransversalityContext tctx = TransversalityContext::from(c.cfg.cones, cert, hf);

  std::ostringstream os;
  os << "n,threshold,fraction,vacuous,degenerate\n";
  std::vector<double> xs, ys;
  for (int n = n_min; n <= n_max; ++n) {
    const TransversalityRecord rec = nontransverse_mass(law, tctx, p, n, delta, trials, derive_seed(c.seed, 2));
    os << n << ',' << fmt(rec.threshold) << ',' << fmt(rec.nontransverse_fraction) << ',' << fmt(rec.vacuous) << ','
       << fmt(rec.degenerate) << '\n';
    xs.push_back(n);
    ys.push_back(rec.nontransverse_fraction);
  }
  write_file(c.out / "transversality.csv", os.str());
  c.summary.add("c10", tctx.c10);
  c.summary.add("lambda", tctx.lambda);
  c.summary.add("l0", hf.l0);
  c.summary.add("theta", hf.theta);
  c.summary.add("constant_field", hf.constant_field);
  const LinearFit fit = semilog_fit(xs, ys);
  c.summary.add("fit_points", fit.points);
  if (fit.points >= 2) {
    c.summary.add("rate", std::exp(fit.slope));
    c.summary.add("r2", fit.r2);
  }
  return kOk;
}

int cmd_expansion(Context& c) {
  Section s(c.cfg.commands, "expansion");
  s.check_known({"n_max", "space_grid", "dir_grid"});
  const int n_max = s.get_int("n_max", 12, 1, 40);
  const int space_grid = s.get_int("space_grid", 2, 1, 1024);
  const int dir_grid = s.get_int("dir_grid", 32, 3, 1 << 16);
  std::vector<double> margins;
  const int found = first_expanding_depth(c.cfg.law(), n_max, space_grid, dir_grid, &margins);
  std::ostringstream os;
  os << "N,margin\n";
  for (std::size_t i = 0; i < margins.size(); ++i) os << i + 1 << ',' << fmt(margins[i]) << '\n';
  write_file(c.out / "expansion.csv", os.str());
  c.summary.add("first_expanding_n", found);
  c.summary.add("expanding", found > 0);
  return found > 0 ? kOk : kViolated;
}

int cmd_equidistribute(Context& c) {
  Section s(c.cfg.commands, "equidistribute");
  s.check_known({"starts", "checkpoints", "words", "resolution", "reference_x0", "reference_n", "reference_words",
                 "reference_burn_in"});
  const int starts = s.get_int("starts", 5, 1, 100000);
  const std::vector<int> checkpoints = s.get_ints("checkpoints", {10, 100}, 1, 10000000);
  for (std::size_t i = 1; i < checkpoints.size(); ++i) {
    if (checkpoints[i] <= checkpoints[i - 1]) throw ConfigInvalid(s.field("checkpoints") + ": must be increasing");
  }
  const int words = s.get_int("words", 20000, 1, 100000000);
  const int resolution = s.get_int("resolution", 32, 1, 4096);
  const TorusPoint ref_x0 = s.get_point("reference_x0", {0.77, 0.33});
  const int ref_n = s.get_int("reference_n", 2000, 2, 100000000);
  const int ref_words = s.get_int("reference_words", 5000, 1, 100000000);
  const int ref_burn = s.get_int("reference_burn_in", 100, 0, ref_n - 1);

  const GeneratorLaw law = c.cfg.law();
  const GridMeasure ref = estimate_stationary(law, ref_x0, ref_n, ref_words, ref_burn, derive_seed(c.seed, 1), resolution);
  std::ostringstream os;
  os << "start,x0,y0,n,distance\n";
  int decayed = 0;
  for (int k = 0; k < starts; ++k) {
    CounterRng r(derive_seed(derive_seed(c.seed, 2), k));
    const double x = r.uniform();
    const double y = r.uniform();
    const EquidistRun run =
        equidistribution_run(law, TorusPoint(x, y), checkpoints, words, resolution, ref, derive_seed(derive_seed(c.seed, 3), k));
    for (std::size_t i = 0; i < run.checkpoints.size(); ++i) {
      os << k << ',' << fmt(run.x0.x) << ',' << fmt(run.x0.y) << ',' << run.checkpoints[i] << ','
         << fmt(run.distances[i]) << '\n';
    }
    if (run.distances.back() < 0.5 * run.distances.front()) ++decayed;
  }
  write_file(c.out / "equidistribution.csv", os.str());
  const double min_mass = min_cell_mass(ref, resolution);
  c.summary.add("starts", starts);
  c.summary.add("halved", decayed);
  c.summary.add("reference_min_cell_mass", min_mass);
  c.summary.add("full_support", min_mass > 0.0);
  return kOk;
}

int cmd_periodic(Context& c) {
  Section s(c.cfg.commands, "periodic");
  s.check_known({"period_max"});
  const int period_max = s.get_int("period_max", 6, 1, 12);
  const auto [f, g] = c.cfg.pair();
  const PeriodicReport rep = common_periodic_points(*f, *g, period_max);
  write_file(c.out / "periodic.csv", periodic_csv(rep));
  c.summary.add("candidates", static_cast<int>(rep.candidates.size()));
  for (std::size_t k = 0; k < rep.common.size(); ++k) {
    c.summary.add("common_period_" + std::to_string(k + 1), static_cast<int>(rep.common[k].size()));
  }
  return kOk;
}

using Handler = int (*)(Context&);

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> table{
      {"certify", cmd_certify},
      {"stationary", cmd_stationary},
      {"rho-norm", cmd_rho_norm},
      {"curve-evolve", cmd_curve_evolve},
      {"key-estimate", cmd_key_estimate},
      {"lasota-yorke", cmd_lasota_yorke},
      {"holder", cmd_holder},
      {"transversality", cmd_transversality},
      {"expansion", cmd_expansion},
      {"equidistribute", cmd_equidistribute},
      {"periodic", cmd_periodic},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"certify",      "stationary", "rho-norm",       "curve-evolve",
                                              "key-estimate", "lasota-yorke", "holder",       "transversality",
                                              "expansion",    "equidistribute", "periodic"};
  return names;
}

int run(const std::string& command, const fs::path& config_path, const fs::path& output_dir,
        const RunOptions& options, std::ostream& err) {
  const auto it = handlers().find(command);
  if (it == handlers().end()) {
    err << "error: unknown command '" << command << "'\n";
    return kError;
  }
  try {
    const RunConfig cfg = load_config(config_path);
    if (options.threads != 0) set_thread_count(options.threads);
    std::error_code ec;
    fs::create_directories(output_dir, ec);
    if (ec) throw Error("cannot create " + output_dir.string() + ": " + ec.message());

    Context ctx{cfg, output_dir, options.seed.value_or(cfg.seed), {}};
    ctx.summary.add("command", command);
    ctx.summary.add("seed", std::to_string(ctx.seed));
    int code = kOk;
    try {
      code = it->second(ctx);
    } catch (const HypothesisViolated& e) {
      ctx.summary.add("hypothesis_violated", std::string(e.what()));
      code = kViolated;
    } catch (const ConeExit& e) {
      ctx.summary.add("cone_exit", std::string(e.what()));
      code = kViolated;
    } catch (const ContractionFailure& e) {
      ctx.summary.add("contraction_failure", std::string(e.what()));
      code = kViolated;
    }
    ctx.summary.add("status", std::string(code == kOk ? "ok" : "violated"));
    write_file(output_dir / "summary.txt", ctx.summary.str());
    return code;
  } catch (const ConfigInvalid& e) {
    err << "config invalid: " << e.what() << '\n';
    return kError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kError;
  }
}

}  // namespace torus_lab::cli
