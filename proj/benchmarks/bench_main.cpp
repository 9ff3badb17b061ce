#include <benchmark/benchmark.h>

#include <cmath>

#include "ruzsa/checks.hpp"
#include "ruzsa/convolve.hpp"
#include "ruzsa/entropy.hpp"
#include "ruzsa/generators.hpp"
#include "ruzsa/report.hpp"
#include "ruzsa/ruzsa_metrics.hpp"

using namespace ruzsa;

namespace {

void finite_convolution(benchmark::State& state, ConvolutionMethod method) {
  const auto g = GroupSpec::cyclic(state.range(0));
  Rng rng(1);
  const FinitePMF p = random_pmf(g, 1.0, rng), q = random_pmf(g, 1.0, rng);
  for (auto _ : state) benchmark::DoNotOptimize(convolve(p, q, Sign::Minus, method));
  state.SetComplexityN(state.range(0));
}

void BM_ConvolveNaive(benchmark::State& s) { finite_convolution(s, ConvolutionMethod::Naive); }
void BM_ConvolveTransform(benchmark::State& s) { finite_convolution(s, ConvolutionMethod::Transform); }
BENCHMARK(BM_ConvolveNaive)->RangeMultiplier(4)->Range(16, 4096)->Complexity();
BENCHMARK(BM_ConvolveTransform)->RangeMultiplier(4)->Range(16, 4096)->Complexity();

void BM_GridSelfConvolution(benchmark::State& state) {
  GridConfig c;
  c.cells = static_cast<std::size_t>(state.range(0));
  const GridDensity g = as_grid(ParametricDensity::exponential(1.0), c);
  for (auto _ : state) benchmark::DoNotOptimize(convolve(g, g, Sign::Minus));
}
BENCHMARK(BM_GridSelfConvolution)->RangeMultiplier(4)->Range(256, 16384);

void BM_Entropy(benchmark::State& state) {
  Rng rng(2);
  const FinitePMF p = random_pmf(GroupSpec::cyclic(state.range(0)), 1.0, rng);
  for (auto _ : state) benchmark::DoNotOptimize(entropy(p));
}
BENCHMARK(BM_Entropy)->RangeMultiplier(8)->Range(64, 32768);

void BM_SigmaGrid(benchmark::State& state) {
  const Density g = as_grid(ParametricDensity::exponential(1.0));
  for (auto _ : state) benchmark::DoNotOptimize(sigma(g, Sign::Minus));
}
BENCHMARK(BM_SigmaGrid);

void BM_Check(benchmark::State& state, const char* check, const char* example) {
  const CheckInputs in = builtin_example(example);
  for (auto _ : state) benchmark::DoNotOptimize(run_check(check, in));
}
BENCHMARK_CAPTURE(BM_Check, triangle, "ruzsa_triangle", "random-z8-triple");
BENCHMARK_CAPTURE(BM_Check, triangle_sharp, "ruzsa_triangle_sharp", "random-z8-triple");
BENCHMARK_CAPTURE(BM_Check, bsg, "bsg", "random-z6-joint");

}  // namespace
BENCHMARK_MAIN();
