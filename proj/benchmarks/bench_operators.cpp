#include <benchmark/benchmark.h>

#include "cochainflow/cup.hpp"
#include "cochainflow/flow.hpp"
#include "cochainflow/hodge.hpp"
#include "cochainflow/whitney.hpp"

using namespace cochainflow;

static void BM_MassMatrix(benchmark::State& state) {
  const auto t = build_flat_torus(static_cast<int>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(whitney_mass_matrix(t, 1));
  state.counters["edges"] = static_cast<double>(t.size(1));
}
BENCHMARK(BM_MassMatrix)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_CupTable(benchmark::State& state) {
  const auto t = build_flat_torus(static_cast<int>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(CupTable(t));
}
BENCHMARK(BM_CupTable)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_Projection(benchmark::State& state) {
  const auto t = build_flat_torus(static_cast<int>(state.range(0)), 2);
  const InnerProductModel model(t, Metric::Whitney);
  const CoclosedProjector pi(model);
  const Eigen::VectorXd c = seeded_uniform(t.size(1), 1);
  for (auto _ : state) benchmark::DoNotOptimize(pi.project(c));
}
BENCHMARK(BM_Projection)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMicrosecond);

// one RK4 step including reprojection
static void BM_FlowStep(benchmark::State& state) {
  const auto t = build_flat_torus(static_cast<int>(state.range(0)), 2);
  const InnerProductModel model(t, state.range(1) ? Metric::Whitney : Metric::Toy);
  const FlowSystem system(model);
  FlowParams p;
  p.nu = 0.01;
  const FlowState s = system.make_state(0.0, random_coclosed(system.projector(), 1).values());
  for (auto _ : state) benchmark::DoNotOptimize(system.step(s, p));
}
BENCHMARK(BM_FlowStep)->ArgsProduct({{8, 16, 32}, {0, 1}})->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
