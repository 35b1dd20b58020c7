#include <benchmark/benchmark.h>

#include "torus_lab/certify.hpp"
#include "torus_lab/curve.hpp"
#include "torus_lab/harness.hpp"
#include "torus_lab/measure.hpp"
#include "torus_lab/parallel.hpp"
#include "torus_lab/projective.hpp"
#include "torus_lab/random_system.hpp"

using namespace torus_lab;

namespace {

const TorusMap kF({2, 1, 1, 1}, {{{1, 0}, {1.0 / (2 * kPi), 0.0}, 0.0}}, 0.05);
const TorusMap kG({3, 5, 1, 2}, {{{0, 1}, {0.0, 1.0 / (2 * kPi)}, 0.0}}, 0.05);

void BM_Certify(benchmark::State& state) {
  set_thread_count(1);
  const int grid = static_cast<int>(state.range(0));
  CertifyOptions opts;
  opts.directions = 256;
  for (auto _ : state) benchmark::DoNotOptimize(certify(kF, kG, ConeSystem::standard(), grid, opts));
  state.SetItemsProcessed(state.iterations() * grid * grid);
}
BENCHMARK(BM_Certify)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_ComposeDifferential(benchmark::State& state) {
  const GeneratorLaw law = GeneratorLaw::pair(kF, kG);
  const Word w = sample_word(law, static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(compose_differential(law, w, {0.3, 0.7}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ComposeDifferential)->Arg(100)->Arg(1000);

void BM_EstimateStationary(benchmark::State& state) {
  set_thread_count(1);
  const GeneratorLaw law = GeneratorLaw::pair(kF, kG);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_stationary(law, {0.1, 0.2}, 1000, 100, 0, 1, 256));
  state.SetItemsProcessed(state.iterations() * 100000);
}
BENCHMARK(BM_EstimateStationary)->Unit(benchmark::kMillisecond);

void BM_GridRhoNorm(benchmark::State& state) {
  set_thread_count(1);
  const GridBallMass balls(GridMeasure::uniform(1024));
  const double rho = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(rho_norm(balls, rho, SmoothReference::lebesgue(), 128));
}
BENCHMARK(BM_GridRhoNorm)->Arg(8)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_CloudRhoInner(benchmark::State& state) {
  set_thread_count(1);
  const CurveFamily fam = random_family(ConeSystem::standard().cone_u, {}, 3);
  const PointCloudMeasure cloud = sample_family(fam, static_cast<std::size_t>(state.range(0)), 1, 1.0 / 64);
  LensOptions lo;
  lo.exclude_diagonal = true;
  for (auto _ : state) benchmark::DoNotOptimize(cloud_rho_inner(cloud, cloud, 1.0 / 64, lo));
}
BENCHMARK(BM_CloudRhoInner)->Arg(10000)->Arg(40000)->Unit(benchmark::kMillisecond);

void BM_PushCurve(benchmark::State& state) {
  const GeneratorLaw law = GeneratorLaw::pair(kF, kG);
  const ConeSystem cones = ConeSystem::standard();
  const CurveJet c = CurveJet::segment({0.3, 0.4}, cones.cone_u.direction(0.5), 0.05, 1.0 / 512);
  const Word w = sample_word(law, static_cast<std::size_t>(state.range(0)), 2);
  PushOptions po;
  po.max_length = 0.5;
  po.cone_u = cones.cone_u;
  for (auto _ : state) benchmark::DoNotOptimize(push_curve(law, c, w, true, po));
}
BENCHMARK(BM_PushCurve)->Arg(10)->Arg(50)->Unit(benchmark::kMicrosecond);

void BM_PushFiber(benchmark::State& state) {
  const GeneratorLaw law = GeneratorLaw::pair(TorusMap({2, 1, 1, 1}), TorusMap({3, 5, 1, 2}));
  const FiberMeasure seed = FiberMeasure::dirac({0, 0}, ConeSystem::standard().cone_u.center());
  for (auto _ : state) benchmark::DoNotOptimize(push_fiber(law, seed, 12, 10000, {0.3, 0.7}, 1));
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_PushFiber)->Unit(benchmark::kMillisecond);

void BM_ExpansionMargin(benchmark::State& state) {
  set_thread_count(1);
  const GeneratorLaw law = GeneratorLaw::pair(TorusMap({2, 1, 1, 1}), TorusMap({3, 5, 1, 2}));
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(uniform_expansion_margin(law, n, 2, 32));
}
BENCHMARK(BM_ExpansionMargin)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
