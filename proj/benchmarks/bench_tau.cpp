#include "tropkp/checks/bundled.hpp"
#include "tropkp/tau.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace tropkp;

const char* const kExamples[] = {"single_loop", "two_loops", "theta_graph", "elliptic_loop"};

void BM_KpJet(benchmark::State& state) {
  const auto ex = checks::bundled_example(kExamples[state.range(0)]);
  const auto p = checks::build_pipeline(ex);
  const LimitTau tau(p.bc, p.data, ex.alpha, ex.c);
  state.SetLabel(ex.name);
  for (auto _ : state) benchmark::DoNotOptimize(kp_jet(tau, 0.3, -0.2, 0.1));
}
BENCHMARK(BM_KpJet)->DenseRange(0, 3);

void BM_KpResidualGrid(benchmark::State& state) {
  const auto ex = checks::bundled_example(kExamples[state.range(0)]);
  const auto p = checks::build_pipeline(ex);
  const LimitTau tau(p.bc, p.data, ex.alpha, ex.c);
  const Grid grid = parse_grid("x:-2:2:11,t2:-2:2:11,t3:-2:2:11");
  state.SetLabel(ex.name);
  for (auto _ : state) benchmark::DoNotOptimize(kp_residual(tau, grid));
}
BENCHMARK(BM_KpResidualGrid)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

void BM_FamilyTau(benchmark::State& state) {
  const auto ex = checks::bundled_example("two_loops");
  const auto p = checks::build_pipeline(ex);
  const auto tau = FamilyTau::regularized(assemble_family(p.bc, p.data), p.data, ex.alpha, ex.c, 1e-5);
  const std::vector<Complex> t{0.1, 0.2, -0.1, 0.05};
  for (auto _ : state) benchmark::DoNotOptimize(tau.value(t));
}
BENCHMARK(BM_FamilyTau);

void BM_ComponentData(benchmark::State& state) {
  const auto ex = checks::bundled_example(kExamples[state.range(0)]);
  state.SetLabel(ex.name);
  for (auto _ : state) benchmark::DoNotOptimize(checks::build_pipeline(ex));
}
BENCHMARK(BM_ComponentData)->DenseRange(0, 3);

}  // namespace
