#include <benchmark/benchmark.h>

#include "volwealth/closed_form.hpp"
#include "volwealth/monte_carlo.hpp"
#include "volwealth/policy.hpp"
#include "volwealth/quadrature.hpp"

using namespace volwealth;

namespace {

const EconomyParams kPoint{0.05, 0.1, 0.02, 0.03, 1.0};

Utility pick(int i) {
  switch (i) {
    case 0: return Utility::power_neg(1.0);
    case 1: return Utility::power_pos(0.5);
    default: return Utility::log();
  }
}

void BM_ClosedForm(benchmark::State& state) {
  const auto u = pick(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(closed_form::evaluate(kPoint, u));
}
BENCHMARK(BM_ClosedForm)->DenseRange(0, 2);

void BM_QuadValue(benchmark::State& state) {
  const auto u = pick(static_cast<int>(state.range(0)));
  quadrature::QuadratureConfig cfg;
  cfg.adaptive_check = state.range(1) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(quadrature::value(kPoint, u, cfg));
}
BENCHMARK(BM_QuadValue)->ArgsProduct({{0, 1, 2}, {0, 1}})->Unit(benchmark::kMicrosecond);

// Gauss-Laguerre node count: cost of the main pass without the check.
void BM_QuadLaguerreNodes(benchmark::State& state) {
  quadrature::QuadratureConfig cfg;
  cfg.adaptive_check = false;
  cfg.n_laguerre = static_cast<int>(state.range(0));
  const auto u = Utility::power_neg(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(quadrature::value(kPoint, u, cfg));
}
BENCHMARK(BM_QuadLaguerreNodes)->RangeMultiplier(2)->Range(32, 512)->Unit(benchmark::kMicrosecond);

void BM_MonteCarlo(benchmark::State& state) {
  monte_carlo::McConfig cfg;
  cfg.n_paths = static_cast<std::size_t>(state.range(0));
  cfg.n_steps = 256;
  cfg.threads = 1;
  const auto u = Utility::power_neg(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(monte_carlo::estimate_all(kPoint, u, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MonteCarlo)->RangeMultiplier(4)->Range(1 << 10, 1 << 16)->Unit(benchmark::kMillisecond);

void BM_OptimalNu(benchmark::State& state) {
  const auto backend = state.range(0) ? policy::Backend::Quadrature : policy::Backend::ClosedForm;
  const auto u = Utility::power_neg(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(policy::optimal_nu(kPoint, u, backend));
}
BENCHMARK(BM_OptimalNu)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
