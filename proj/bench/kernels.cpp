// Serial reference vs OpenMP kernels. Run with --benchmark_filter to select.

#include <benchmark/benchmark.h>

#include <vector>

#include "stvol/estim.hpp"
#include "stvol/maxent.hpp"
#include "stvol/microsim.hpp"
#include "stvol/retdist.hpp"

using namespace stvol;
using maxent::ModelParams;
using maxent::VolScale;

namespace {

Exec exec_of(const benchmark::State& s) { return s.range(0) ? Exec::parallel : Exec::serial; }

void label(benchmark::State& s) { s.SetLabel(s.range(0) ? "parallel" : "serial"); }

void BM_sample_returns(benchmark::State& s) {
  const auto d = retdist::ReturnDist::raw(VolScale::from_mean_w(ModelParams::st11(), 1.0));
  for (auto _ : s) benchmark::DoNotOptimize(retdist::sample_returns(d, 1'000'000, 1, exec_of(s)));
  label(s);
  s.SetItemsProcessed(s.iterations() * 1'000'000);
}

void BM_evaluate_grid_cdf(benchmark::State& s) {
  const auto d = retdist::ReturnDist::raw(VolScale::from_mean_w(ModelParams::st11(), 1.0));
  std::vector<double> xs(20'000);
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = -10.0 + 20.0 * static_cast<double>(i) / xs.size();
  for (auto _ : s) benchmark::DoNotOptimize(retdist::evaluate_grid(d, xs, retdist::Quantity::cdf, exec_of(s)));
  label(s);
  s.SetItemsProcessed(s.iterations() * static_cast<long>(xs.size()));
}

void BM_double_stochastic(benchmark::State& s) {
  const auto m = ModelParams::st11();
  const auto scale = VolScale::from_mean_w(m, 0.005);
  const microsim::WalkConfig base{0.01, 100.0, 0.5, 0};
  for (auto _ : s)
    benchmark::DoNotOptimize(microsim::simulate_double_stochastic(m, scale, base, {1.0, 20'000}, 3, {}, exec_of(s)));
  label(s);
  s.SetItemsProcessed(s.iterations() * 20'000);
}

void BM_maxent_verify(benchmark::State& s) {
  const auto m = ModelParams::st11();
  const auto scale = VolScale::from_mean_w(m, 1.0);
  for (auto _ : s) benchmark::DoNotOptimize(maxent::maxent_verify(m, scale, 100, 4, {}, exec_of(s)));
  label(s);
}

void BM_compare_models(benchmark::State& s) {
  const auto x = retdist::sample_returns(retdist::ReturnDist::raw(VolScale::from_mean_w(ModelParams::st11(), 1.0)),
                                         50'000, 5);
  for (auto _ : s) benchmark::DoNotOptimize(estim::compare_models(x, {}, exec_of(s)));
  label(s);
}

}  // namespace

BENCHMARK(BM_sample_returns)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_evaluate_grid_cdf)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_double_stochastic)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_maxent_verify)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_compare_models)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
