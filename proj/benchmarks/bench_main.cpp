#include <benchmark/benchmark.h>

#include <cmath>

#include "rpif/flow.hpp"
#include "rpif/oracle.hpp"
#include "rpif/propagator.hpp"

using namespace rpif;

namespace {

TrapParameters unit_trap() {
  TrapParameters t;
  t.charge = 1.0;
  t.mass = 1.0;
  t.half_gap = 1.0;
  t.dc_voltage = 0.3;
  t.ac_voltage = 0.8;
  t.drive_omega = 2.5;
  t.hbar = 0.2;
  return t;
}

EffectiveFrequencySpec driven() { return {cplx(0.3, -1e-4), 2.1, 5.0}; }

// Gelfand-Yaglom solution over state.range(0) drive periods.
void BM_HomogeneousPeriods(benchmark::State& state) {
  const auto spec = driven();
  const double t1 = static_cast<double>(state.range(0)) * spec.period() + 0.3;
  FlowOptions opts;
  opts.stepping = Stepping::Periodic;
  for (auto _ : state) benchmark::DoNotOptimize(propagate_homogeneous(spec, 0.0, t1, opts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_HomogeneousPeriods)->RangeMultiplier(10)->Range(100, 100000)->Unit(benchmark::kMillisecond);

void BM_HomogeneousDirect(benchmark::State& state) {
  const auto spec = driven();
  const double t1 = static_cast<double>(state.range(0)) * spec.period() + 0.3;
  FlowOptions opts;
  opts.stepping = Stepping::Direct;
  for (auto _ : state) benchmark::DoNotOptimize(propagate_homogeneous(spec, 0.0, t1, opts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_HomogeneousDirect)->RangeMultiplier(10)->Range(100, 10000)->Unit(benchmark::kMillisecond);

// Forced run with a sampled record whose nodes fall inside periods.
void BM_ForcedRun(benchmark::State& state) {
  const auto spec = driven();
  const double T = 2000.0 * spec.period();
  const auto nodes = static_cast<std::size_t>(state.range(0));
  std::vector<cplx> f(nodes);
  for (std::size_t i = 0; i < nodes; ++i) f[i] = cplx(0.0, -std::sin(0.37 * static_cast<double>(i)));
  const ForcingProfile force(0.0, T / static_cast<double>(nodes - 1), f);
  for (auto _ : state) {
    benchmark::DoNotOptimize(propagate_forced(spec, 1.0, force, 0.0, T, 0.1, 0.0, FlowOptions{}));
  }
}
BENCHMARK(BM_ForcedRun)->Arg(17)->Arg(257)->Arg(1025)->Unit(benchmark::kMillisecond);

void BM_Oracle(benchmark::State& state) {
  const auto trap = unit_trap();
  const MeasurementConfig meas{0.0, 5.0, 0.5};
  const AxisProblem problem{trap, Axis::X, meas, render(SinusoidRecord{0.1, 0.7, 0.2}, meas, 129),
                            {0.1, -0.2, 0.0, 5.0}};
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(discrete_propagator(problem, n));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Oracle)->RangeMultiplier(4)->Range(256, 65536)->Complexity(benchmark::oN);

void BM_RestrictedPropagator(benchmark::State& state) {
  const auto trap = unit_trap();
  const double T = static_cast<double>(state.range(0));
  const MeasurementConfig meas{0.0, T, 0.5};
  const AxisProblem problem{trap, Axis::X, meas, render(SinusoidRecord{0.1, 0.7, 0.2}, meas, 257),
                            {0.1, -0.2, 0.0, T}};
  for (auto _ : state) benchmark::DoNotOptimize(restricted_propagator(problem));
}
BENCHMARK(BM_RestrictedPropagator)->Arg(5)->Arg(500)->Arg(50000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
