#include <benchmark/benchmark.h>

#include "adkyle/builtin_configs.hpp"
#include "adkyle/demand.hpp"
#include "adkyle/equilibrium.hpp"
#include "adkyle/intensity.hpp"
#include "adkyle/market.hpp"
#include "adkyle/smile.hpp"

using namespace adkyle;

namespace {

// Sampler construction dominates a solve; Phi is one pass over the cached normals.
void BM_SamplerBuild(benchmark::State& state) {
  const int signals = static_cast<int>(state.range(0));
  for (auto _ : state) {
    CanonicalSampler s(signals, McConfig{200000, 42, true});
    benchmark::DoNotOptimize(s.normals(0).data());
  }
}
BENCHMARK(BM_SamplerBuild)->Arg(2)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_Phi(benchmark::State& state) {
  const CanonicalSampler s(static_cast<int>(state.range(0)), McConfig{200000, 42, true});
  for (auto _ : state) benchmark::DoNotOptimize(s.phi(1.5).value);
}
BENCHMARK(BM_Phi)->Arg(2)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_GramAndSqrt(benchmark::State& state) {
  const auto m = vol_example_config().build();
  for (auto _ : state) benchmark::DoNotOptimize(information_intensity(m).rank);
}
BENCHMARK(BM_GramAndSqrt)->Unit(benchmark::kMicrosecond);

void BM_FlowToKernel(benchmark::State& state) {
  const auto m = vol_example_config().build();
  const auto d = informed_demand(m, 1.4141, information_intensity(m));
  RngStream rng(7);
  for (auto _ : state) {
    const auto path = simulate_order_flow(d.portfolios[0], m, rng);
    const auto post = posterior_from_flow(overlap_statistic(path, d.portfolios, m), d.portfolios, m);
    benchmark::DoNotOptimize(pricing_kernel(post.probs, m).data());
  }
}
BENCHMARK(BM_FlowToKernel)->Unit(benchmark::kMicrosecond);

void BM_BreedenLitzenberger(benchmark::State& state) {
  const auto m = vol_example_config().build();
  const auto d = informed_demand(m, 1.4141, information_intensity(m));
  for (auto _ : state) {
    const auto dec = breeden_litzenberger(d.portfolios[0], m.grid(), 0.01);
    benchmark::DoNotOptimize(reconstruct(dec, m.grid()).data());
  }
}
BENCHMARK(BM_BreedenLitzenberger)->Unit(benchmark::kMicrosecond);

void BM_ImpliedVol(benchmark::State& state) {
  const OptionQuote q{110.0, OptionSide::Call, black_price(100, 110, 1, 0.27, OptionSide::Call), 100, 1, 0};
  for (auto _ : state) benchmark::DoNotOptimize(implied_vol(q));
}
BENCHMARK(BM_ImpliedVol);

}  // namespace

BENCHMARK_MAIN();
