// Serial reference step against the OpenMP kernel on sphere fields.
#include <benchmark/benchmark.h>
#include <omp.h>

#include <array>

#include "lsmcf/evolution.hpp"
#include "lsmcf/kernels.hpp"
#include "lsmcf/shapes.hpp"

namespace {

lsmcf::ScalarField sphere_field(int n, int dim) {
  std::array<lsmcf::Extent, 3> ext{{{-1, 1}, {-1, 1}, {-1, 1}}};
  std::array<int, 3> res{n, n, n};
  const lsmcf::Grid g = lsmcf::make_grid(dim, std::span(ext.data(), dim), std::span(res.data(), dim));
  return lsmcf::init_field(lsmcf::ShapeSpec{lsmcf::Sphere{dim, {0, 0, 0}, 0.8}}, g);
}

template <bool Parallel>
void BM_Step(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int dim = static_cast<int>(state.range(1));
  const int threads = static_cast<int>(state.range(2));
  omp_set_num_threads(threads);
  const lsmcf::ScalarField v = sphere_field(n, dim);
  lsmcf::ScalarField out(v.grid);
  lsmcf::EvolutionParams p;
  const double dt = lsmcf::cfl_dt(v.grid, p);
  for (auto _ : state) {
    if constexpr (Parallel)
      benchmark::DoNotOptimize(lsmcf::kernels::step_parallel(v, out, dt, p.epsilon));
    else
      benchmark::DoNotOptimize(lsmcf::kernels::step_serial_reference(v, out, dt, p.epsilon));
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(v.size()));
}

}  // namespace

BENCHMARK(BM_Step<false>)->Name("step_serial_reference")->Args({256, 2, 1})->Args({64, 3, 1})->Args({96, 3, 1});
BENCHMARK(BM_Step<true>)
    ->Name("step_parallel")
    ->Args({256, 2, 1})
    ->Args({64, 3, 1})
    ->Args({96, 3, 1})
    ->Args({96, 3, 2})
    ->Args({96, 3, 4});

BENCHMARK_MAIN();
