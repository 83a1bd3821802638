#include <benchmark/benchmark.h>

#include <vector>

#include "mylab/matrixproc.hpp"
#include "mylab/paths.hpp"
#include "mylab/rng.hpp"
#include "mylab/specialfn.hpp"

namespace {

void BM_MacdonaldK(benchmark::State& state) {
  const double x = static_cast<double>(state.range(0)) / 100.0;
  for (auto _ : state) benchmark::DoNotOptimize(mylab::specialfn::macdonald_k(0.45, x));
}
BENCHMARK(BM_MacdonaldK)->Arg(1)->Arg(100)->Arg(10000);

void BM_KRatio(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(mylab::specialfn::macdonald_k_ratio(0.5, 0.0, 0.7));
}
BENCHMARK(BM_KRatio);

void BM_BrownianPath(benchmark::State& state) {
  const mylab::paths::TimeGrid grid(1.0, static_cast<std::size_t>(state.range(0)));
  mylab::RngStream rng(1, 0);
  for (auto _ : state) {
    auto eta = mylab::paths::eta_functional(mylab::paths::sample_bm(grid, 0.0, rng));
    benchmark::DoNotOptimize(eta.values.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BrownianPath)->Arg(1000);

void BM_TriangularPath(benchmark::State& state) {
  namespace mp = mylab::matrixproc;
  const mylab::paths::TimeGrid grid(1.0, 1000);
  mylab::RngStream rng(2, 0);
  for (auto _ : state) {
    auto l = mp::sample_triangular_bm(static_cast<int>(state.range(0)), mp::Field::Complex, grid,
                                      {}, rng);
    benchmark::DoNotOptimize(l);
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_TriangularPath)->Arg(2)->Arg(3);

void BM_SingularValues(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  mylab::matrixproc::Matrix m = mylab::matrixproc::Matrix::Random(p, p);
  for (auto _ : state) benchmark::DoNotOptimize(mylab::matrixproc::singular_values(m));
}
BENCHMARK(BM_SingularValues)->Arg(2)->Arg(4);

}  // namespace

BENCHMARK_MAIN();
