// Serial reference vs OpenMP kernels on workloads sized like the CLI's.

#include <benchmark/benchmark.h>

#include <random>

#include "reram/kernels.hpp"

namespace {

using namespace reram;

const ModelParams P = preset_params();

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return out;
}

template <auto Fn>
void rate_surface(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  const auto rs = linspace(5e3, 3e4, n);
  const auto vs = linspace(-1.0, 1.0, n);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(P, SmoothingParams{}, rs, vs, RateVariant::smooth));
  state.SetItemsProcessed(state.iterations() * n * n);
}

std::vector<Trajectory> jobs(int n) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Trajectory> out;
  for (int i = 0; i < n; ++i) out.push_back({5e3 + 2.5e4 * u(rng), 2.0 * u(rng) - 1.0, 0.1 * u(rng)});
  return out;
}

template <auto Fn>
void pulse_responses(benchmark::State& state) {
  const auto batch = jobs(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Fn(P, batch));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Fn>
void window_slopes(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  const auto t = linspace(1e-4, 1e-4 * n, n);
  std::vector<double> y(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) y[i] = 1e4 + 3e6 * t[i] * t[i];
  for (auto _ : state) benchmark::DoNotOptimize(Fn(t, y, 11, 5));
  state.SetItemsProcessed(state.iterations() * n);
}

}  // namespace

BENCHMARK(rate_surface<serial::rate_surface>)->Name("rate_surface/serial")->Arg(200)->Arg(1000);
BENCHMARK(rate_surface<parallel::rate_surface>)->Name("rate_surface/parallel")->Arg(200)->Arg(1000)->UseRealTime();
BENCHMARK(pulse_responses<serial::pulse_responses>)->Name("pulse_responses/serial")->Arg(100000);
BENCHMARK(pulse_responses<parallel::pulse_responses>)->Name("pulse_responses/parallel")->Arg(100000)->UseRealTime();
BENCHMARK(window_slopes<serial::window_slopes>)->Name("window_slopes/serial")->Arg(500)->Arg(100000);
BENCHMARK(window_slopes<parallel::window_slopes>)->Name("window_slopes/parallel")->Arg(500)->Arg(100000)->UseRealTime();

BENCHMARK_MAIN();
