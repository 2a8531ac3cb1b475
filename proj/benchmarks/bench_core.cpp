#include "bwlab/hermite.hpp"
#include "bwlab/mise.hpp"
#include "bwlab/mixtures.hpp"
#include "bwlab/random.hpp"
#include "bwlab/selectors.hpp"

#include <benchmark/benchmark.h>

using namespace bwlab;

namespace {

Sample normal_sample(std::size_t n)
{
  Stream s(17);
  return sample_mixture(NormalMixture::normal(), n, s);
}

} // namespace

static void BM_EstimateAlphas(benchmark::State& state)
{
  const auto x = normal_sample(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(estimate_alphas(x, 1.0, 0.8, 2));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EstimateAlphas)->RangeMultiplier(2)->Range(128, 4096)->Complexity(benchmark::oNSquared);

static void BM_UcvObjective(benchmark::State& state)
{
  const auto x = normal_sample(static_cast<std::size_t>(state.range(0)));
  const UcvObjective f(x, Kernel::normal());
  for (auto _ : state)
    benchmark::DoNotOptimize(f(0.4));
}
BENCHMARK(BM_UcvObjective)->Arg(100)->Arg(400)->Arg(1600);

static void BM_SelectUcv(benchmark::State& state)
{
  const auto x = normal_sample(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(select_ucv(x, Kernel::normal()).h_hat);
}
BENCHMARK(BM_SelectUcv)->Arg(100)->Arg(400);

static void BM_ExactDnaEpanechnikov(benchmark::State& state)
{
  const auto g = difference_density(preset_mixture("skewed"));
  for (auto _ : state)
    benchmark::DoNotOptimize(exact_dna(g, Kernel::epanechnikov(), 100, 0.9));
}
BENCHMARK(BM_ExactDnaEpanechnikov);

static void BM_ExactDnaNormal(benchmark::State& state)
{
  const auto g = difference_density(preset_mixture("skewed"));
  for (auto _ : state)
    benchmark::DoNotOptimize(exact_dna(g, Kernel::normal(), 100, 0.3));
}
BENCHMARK(BM_ExactDnaNormal);

static void BM_TrueOptimalHEpanechnikov(benchmark::State& state)
{
  const auto g = difference_density(NormalMixture::normal());
  const auto bracket = default_bracket(Kernel::epanechnikov(), 100, 1.0);
  for (auto _ : state) {
    DnaCurve curve{ [&](double h) { return exact_dna(g, Kernel::epanechnikov(), 100, h); }, bracket, "exact", {} };
    benchmark::DoNotOptimize(minimize_dna(curve).h);
  }
}
BENCHMARK(BM_TrueOptimalHEpanechnikov)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
