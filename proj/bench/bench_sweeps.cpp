// Serial reference against the OpenMP kernels, and banded against dense SVD.

#include <benchmark/benchmark.h>

#include "limitspec/banded.hpp"
#include "limitspec/limitops.hpp"
#include "limitspec/spectra.hpp"

using namespace limitspec;

namespace {

BandOperator pseudo_ergodic_bidiagonal() {
  return band({{-1, Constant{1.0}}, {0, make_pseudo_ergodic({0.0, 2.0}, 7)}});
}

Execution mode(const benchmark::State& state) { return state.range(0) ? Execution::parallel : Execution::serial; }

void BM_SminGrid(benchmark::State& state) {
  const BandOperator a = pseudo_ergodic_bidiagonal();
  const Grid grid({-1.25, 3.25, -1.25, 1.25}, 16, 16);
  for (auto _ : state) benchmark::DoNotOptimize(smin_grid(a, grid, state.range(1), mode(state)));
  state.SetLabel(state.range(0) ? "parallel" : "serial");
}
BENCHMARK(BM_SminGrid)->ArgsProduct({{0, 1}, {100, 400}})->Unit(benchmark::kMillisecond);

void BM_EssentialSpectrum(benchmark::State& state) {
  const BandOperator a = pseudo_ergodic_bidiagonal();
  const Grid grid({-1.25, 3.25, -1.25, 1.25}, 128, 128);
  EssentialOptions opts;
  opts.word_len = static_cast<int>(state.range(1));
  opts.exec = mode(state);
  for (auto _ : state) benchmark::DoNotOptimize(essential_spectrum(a, grid, opts));
  state.SetLabel(state.range(0) ? "parallel" : "serial");
}
BENCHMARK(BM_EssentialSpectrum)->ArgsProduct({{0, 1}, {3, 5}})->Unit(benchmark::kMillisecond);

void BM_SingularValuesBanded(benchmark::State& state) {
  const std::int64_t n = state.range(0);
  const BandedMatrix m = shifted_window(pseudo_ergodic_bidiagonal(), {0.5, 0.3}, IndexRange::symmetric(n),
                                        IndexRange::symmetric(n));
  for (auto _ : state) benchmark::DoNotOptimize(singular_values(m));
}
BENCHMARK(BM_SingularValuesBanded)->Arg(25)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_SingularValuesDense(benchmark::State& state) {
  const std::int64_t n = state.range(0);
  const Eigen::MatrixXcd m = shifted_window(pseudo_ergodic_bidiagonal(), {0.5, 0.3}, IndexRange::symmetric(n),
                                            IndexRange::symmetric(n))
                                 .to_dense();
  for (auto _ : state) benchmark::DoNotOptimize(singular_values_dense(m));
}
BENCHMARK(BM_SingularValuesDense)->Arg(25)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
