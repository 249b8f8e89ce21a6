#include <benchmark/benchmark.h>

#include <speclab/experiments.hpp>
#include <speclab/limit_ops.hpp>

namespace {

using namespace speclab;

void bm_build_similarity(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Density d = Density::piecewise_two_bump(0.3);
  const KernelSpec k = KernelSpec::product(1.0, 2.0);
  const SampleSet s = sample(d, n, 42);
  for (auto _ : state) {
    Matrix sim = build_similarity(s, k);
    benchmark::DoNotOptimize(sim.data());
  }
}
BENCHMARK(bm_build_similarity)->Arg(200)->Arg(800);

void bm_eig_sym(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Density d = Density::piecewise_two_bump(0.3);
  const KernelSpec k = KernelSpec::product(1.0, 2.0);
  const SampleSet s = sample(d, n, 42);
  const LaplacianMatrix lap =
      build_laplacian(build_similarity(s, k), LaplacianKind::SymNorm);
  for (auto _ : state) {
    EigenSystem es = eig_sym(lap.m, 2);
    benchmark::DoNotOptimize(es.values.data());
  }
}
BENCHMARK(bm_eig_sym)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void bm_limit_eigs(benchmark::State& state) {
  const auto nodes = static_cast<std::size_t>(state.range(0));
  const Density d = Density::piecewise_two_bump(0.3);
  const KernelSpec k = KernelSpec::product(1.0, 2.0);
  const QuadratureGrid grid = build_grid(d, nodes);
  for (auto _ : state) {
    const LimitOperatorDisc op = build_limit(LimitKind::NormalizedT, k, grid);
    EigenSystem es = limit_eigs(op, 3);
    benchmark::DoNotOptimize(es.values.data());
  }
}
BENCHMARK(bm_limit_eigs)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
