#include <benchmark/benchmark.h>

#include "costas/analysis.hpp"
#include "costas/dynamics.hpp"
#include "costas/integrate.hpp"
#include "costas/lti.hpp"
#include "costas/scenarios.hpp"

namespace {

using costas::ModelVariant;

costas::LoopConfig detuned_config() {
  auto c = costas::base_config();
  c.omega_vco_free = 2.6314e6;
  return c;
}

void BM_Rhs(benchmark::State& state) {
  const auto variant = static_cast<ModelVariant>(state.range(0));
  const costas::LoopModel model(detuned_config(), variant);
  auto y = model.initial_state();
  y[0] += 0.1;
  std::vector<double> dy(y.size());
  double t = 0.0;
  for (auto _ : state) {
    model.rhs(t, y, dy);
    benchmark::DoNotOptimize(dy.data());
    t += 1e-9;
  }
  state.SetLabel(std::string(costas::to_string(variant)));
}
BENCHMARK(BM_Rhs)->DenseRange(0, 2);

void BM_Rk4Steps(benchmark::State& state) {
  const auto variant = static_cast<ModelVariant>(state.range(0));
  const costas::LoopModel model(detuned_config(), variant);
  const double dt = costas::default_dt(model.config(), variant);
  auto rhs = [&](double t, std::span<const double> y, std::span<double> d) { model.rhs(t, y, d); };
  costas::Rk4Workspace ws(model.dimension());
  for (auto _ : state) {
    auto y = model.initial_state();
    for (int k = 0; k < 1000; ++k) costas::rk4_step(rhs, k * dt, std::span<double>(y), dt, ws);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * 1000);
  state.SetLabel(std::string(costas::to_string(variant)));
}
BENCHMARK(BM_Rk4Steps)->DenseRange(0, 2);

void BM_SimulateSignalSpace(benchmark::State& state) {
  const auto c = detuned_config();
  const auto plan = costas::default_plan(c, ModelVariant::kSignalSpace, 1e-3);
  for (auto _ : state) benchmark::DoNotOptimize(costas::simulate(c, plan).size());
}
BENCHMARK(BM_SimulateSignalSpace)->Unit(benchmark::kMillisecond);

void BM_DetectLock(benchmark::State& state) {
  const auto c = detuned_config();
  const auto trace = costas::simulate(c, costas::default_plan(c, ModelVariant::kAveragedPhase, 10e-3));
  for (auto _ : state) benchmark::DoNotOptimize(costas::detect_lock(trace, c).locked);
}
BENCHMARK(BM_DetectLock);

void BM_ConvolutionSolution(benchmark::State& state) {
  const auto f = costas::make_first_order_lpf(2.0);
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> t(n), u(n, 1.0);
  for (std::size_t k = 0; k < n; ++k) t[k] = 1e-3 * static_cast<double>(k);
  for (auto _ : state) {
    benchmark::DoNotOptimize(costas::convolution_solution(f, costas::FilterState::Zero(1), u, t));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ConvolutionSolution)->RangeMultiplier(2)->Range(256, 4096)->Complexity();

void BM_Stability(benchmark::State& state) {
  const auto c = detuned_config();
  for (auto _ : state) benchmark::DoNotOptimize(costas::stability(c, 0.0).hurwitz);
}
BENCHMARK(BM_Stability);

}  // namespace

BENCHMARK_MAIN();
