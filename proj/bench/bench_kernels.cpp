// Serial vs parallel timings for the star product and fusion build.
#include <benchmark/benchmark.h>

#include "starspec/star.hpp"

using namespace starspec;

namespace {

Execution mode(const benchmark::State& st) { return st.range(0) ? Execution::parallel : Execution::serial; }

void BM_BuildFusionSphere(benchmark::State& st) {
  const SphereBasis b(static_cast<int>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(b.build_fusion(kDefaultDropTol, mode(st)).nnz());
}

void BM_BuildFusionTorus(benchmark::State& st) {
  const TorusBasis b(2, static_cast<int>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(b.build_fusion(kDefaultDropTol, mode(st)).nnz());
}

void BM_StarSphere(benchmark::State& st) {
  const DeformedAlgebra alg(std::make_shared<const SphereBasis>(static_cast<int>(st.range(1))), Weight::eigenvalue_phase(1.0));
  const auto f = random_coeff_vec(alg.spectrum_ptr(), 1, 1.0);
  const auto g = random_coeff_vec(alg.spectrum_ptr(), 2, 1.0);
  for (auto _ : st) benchmark::DoNotOptimize(alg.star(f, g, mode(st)));
}

void BM_StarTorus(benchmark::State& st) {
  const DeformedAlgebra alg(std::make_shared<const TorusBasis>(2, static_cast<int>(st.range(1))),
                            Weight::torus_triphase(SkewMatrix::planar(0.3)));
  const auto f = random_coeff_vec(alg.spectrum_ptr(), 1, 1.0);
  const auto g = random_coeff_vec(alg.spectrum_ptr(), 2, 1.0);
  for (auto _ : st) benchmark::DoNotOptimize(alg.star(f, g, mode(st)));
}

}  // namespace

BENCHMARK(BM_BuildFusionSphere)->ArgsProduct({{0, 1}, {6, 10}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BuildFusionTorus)->ArgsProduct({{0, 1}, {6, 10}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StarSphere)->ArgsProduct({{0, 1}, {6, 10}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_StarTorus)->ArgsProduct({{0, 1}, {6, 10}})->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
