#include <benchmark/benchmark.h>

#include "tlsphonon/dynamics.hpp"
#include "tlsphonon/presets.hpp"
#include "tlsphonon/spectrum.hpp"
#include "tlsphonon/steadystate.hpp"
#include "tlsphonon/sweep.hpp"

using namespace tlsphonon;

static void BM_Gain(benchmark::State& state) {
  const SystemParams p = device_params();
  double n = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(gain(p, n));
    n += 1e-9;
  }
}
BENCHMARK(BM_Gain);

static void BM_FixedPoint(benchmark::State& state) {
  const SystemParams p = device_params();
  for (auto _ : state) benchmark::DoNotOptimize(solve_nb_fixed_point(p));
}
BENCHMARK(BM_FixedPoint);

static void BM_Eigenvalues(benchmark::State& state) {
  const EffectiveParams eff = effective_params(device_params(), 4.0);
  for (auto _ : state) benchmark::DoNotOptimize(eigenvalues(eff));
}
BENCHMARK(BM_Eigenvalues);

static void BM_LocateEp(benchmark::State& state) {
  const EffectiveParams eff = effective_params(device_params(), 4.0);
  for (auto _ : state) benchmark::DoNotOptimize(locate_ep(eff, 1e5, 4e7));
}
BENCHMARK(BM_LocateEp);

// One microsecond of the full model at 0.05 / fastest frequency per step.
static void BM_IntegrateFull(benchmark::State& state) {
  const SystemParams p = device_params();
  IntegratorSettings s;
  s.dt = 0.05 / FullModel(p).fastest_frequency();
  s.t_final = 1e-6;
  s.stride = 100;
  for (auto _ : state) benchmark::DoNotOptimize(integrate_full(p, default_initial_state(), s));
}
BENCHMARK(BM_IntegrateFull)->Unit(benchmark::kMillisecond);

static void BM_PresetSweep(benchmark::State& state) {
  const SweepSpec spec = preset("fig3a");
  const auto jobs = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep(spec, jobs));
}
BENCHMARK(BM_PresetSweep)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
