#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "s3tori/deform.hpp"
#include "s3tori/intersection.hpp"
#include "s3tori/spectral.hpp"

using namespace s3tori;

static void BM_CurvaturesClifford(benchmark::State& state) {
  const SurfacePtr m = clifford_torus();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> a(0.0, kTwoPi);
  for (auto _ : state) benchmark::DoNotOptimize(curvatures(*m, a(rng), a(rng)));
}
BENCHMARK(BM_CurvaturesClifford);

static void BM_CurvaturesPerturbedCyclide(benchmark::State& state) {
  const SurfacePtr m = perturb_normal(cyclide_torus({1.5, 1.0, 0.3}), TrigBump({{2, 1, 1e-3, 0}}));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> a(0.0, kTwoPi);
  for (auto _ : state) benchmark::DoNotOptimize(curvatures(*m, a(rng), a(rng)));
}
BENCHMARK(BM_CurvaturesPerturbedCyclide);

static void BM_ClassifyClifford(benchmark::State& state) {
  const Classifier cl(clifford_torus(), {static_cast<int>(state.range(0))});
  const auto poles = scan_poles(64, 3);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(cl.classify(Equator(poles[i++ % poles.size()])));
}
BENCHMARK(BM_ClassifyClifford)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_ComponentCount(benchmark::State& state) {
  const SurfacePtr m = clifford_torus();
  const int n = static_cast<int>(state.range(0));
  const auto poles = scan_poles(64, 5);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(component_count(*m, Equator(poles[i++ % poles.size()]), n));
}
BENCHMARK(BM_ComponentCount)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_AssembleOperators(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SurfaceMesh mesh = sample_mesh(*clifford_torus(), n, n);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_operators(mesh));
}
BENCHMARK(BM_AssembleOperators)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_FirstEigenpairs(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SurfaceMesh mesh = sample_mesh(*clifford_torus(), n, n);
  const Operators ops = assemble_operators(mesh);
  for (auto _ : state) benchmark::DoNotOptimize(first_eigenpairs(ops, n, n, 8));
}
BENCHMARK(BM_FirstEigenpairs)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_HolderSeminorm(benchmark::State& state) {
  const AnnulusMapPtr d = difference(canonical_extend(twist_map(0.05)), annulus_identity());
  for (auto _ : state) benchmark::DoNotOptimize(holder_seminorm(*d, 0.5, 1000, 42));
}
BENCHMARK(BM_HolderSeminorm)->Unit(benchmark::kMillisecond);

static void BM_TauTwist(benchmark::State& state) {
  const SphereMapPtr xi = twist_map(0.05);
  for (auto _ : state) benchmark::DoNotOptimize(tau(xi, 0.5));
}
BENCHMARK(BM_TauTwist)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
