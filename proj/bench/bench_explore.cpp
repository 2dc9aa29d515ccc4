#include <benchmark/benchmark.h>

#include "subst/commerce.hpp"

// Serial versus parallel exploration on the shop machines at growing product
// counts. The composed machine at 8 products is the heavyweight case: about
// 1.7 million states.

using namespace subst;

namespace {

Machine two_site(uint32_t n) {
  CommerceConfig c;
  c.products = n;
  return build_m12(c).first;
}

Machine composed(uint32_t n) {
  CommerceConfig c;
  c.products = n;
  return build_m13(c);
}

ExploreOptions opts_for(ExecMode mode) {
  ExploreOptions o;
  o.mode = mode;
  o.state_cap = 50'000'000;
  return o;
}

void bench_reachable(benchmark::State& state, Machine (*build)(uint32_t), uint32_t n,
                     ExecMode mode) {
  Machine m = build(n);
  ExploreOptions o = opts_for(mode);
  uint64_t states = 0;
  for (auto _ : state) {
    ExploreResult r = reachable(m, o);
    states = r.states.size();
    benchmark::DoNotOptimize(states);
  }
  state.counters["states"] = static_cast<double>(states);
}

void bench_invariants(benchmark::State& state, Machine (*build)(uint32_t), uint32_t n,
                      ExecMode mode) {
  Machine m = build(n);
  ExploreOptions o = opts_for(mode);
  for (auto _ : state) {
    ObligationReport r = check_invariants(m, o);
    benchmark::DoNotOptimize(r.pass);
  }
}

}  // namespace

BENCHMARK_CAPTURE(bench_reachable, composed_n5_serial, composed, 5, ExecMode::Serial)
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bench_reachable, composed_n5_parallel, composed, 5, ExecMode::Parallel)
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bench_reachable, two_site_n10_serial, two_site, 10, ExecMode::Serial)
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bench_reachable, two_site_n10_parallel, two_site, 10,
                  ExecMode::Parallel)
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bench_reachable, composed_n8_serial, composed, 8, ExecMode::Serial)
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bench_reachable, composed_n8_parallel, composed, 8, ExecMode::Parallel)
    ->Unit(benchmark::kMillisecond);

BENCHMARK_CAPTURE(bench_invariants, composed_n5_serial, composed, 5, ExecMode::Serial)
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bench_invariants, composed_n5_parallel, composed, 5,
                  ExecMode::Parallel)
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bench_invariants, two_site_n10_serial, two_site, 10, ExecMode::Serial)
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bench_invariants, two_site_n10_parallel, two_site, 10,
                  ExecMode::Parallel)
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
