#include "tropkp/checks/oracles.hpp"
#include "tropkp/checks/random_instances.hpp"
#include "tropkp/tropical_theta.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace tropkp;

struct Instance {
  TropicalPeriodMatrix b;
  RationalVector alpha;
};

std::vector<Instance> instances(int h1, std::size_t count) {
  checks::Rng rng(static_cast<std::uint64_t>(h1) * 7919);
  checks::RandomCurveOptions options;
  options.min_h1 = h1;
  options.max_h1 = h1;
  options.max_edges = h1 + 5;
  std::vector<Instance> out;
  while (out.size() < count) {
    const auto curve = checks::random_curve(rng, options);
    const auto b = period_matrix(curve, cycle_basis(curve));
    out.push_back({b, checks::random_alpha(rng, b.dimension())});
  }
  return out;
}

void BM_DelaunaySet(benchmark::State& state) {
  const auto list = instances(static_cast<int>(state.range(0)), 16);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& inst = list[i++ % list.size()];
    benchmark::DoNotOptimize(delaunay_set(inst.b, inst.alpha));
  }
}
BENCHMARK(BM_DelaunaySet)->DenseRange(1, 6);

void BM_ExhaustiveBox(benchmark::State& state) {
  const auto list = instances(static_cast<int>(state.range(0)), 4);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& inst = list[i++ % list.size()];
    benchmark::DoNotOptimize(checks::exhaustive_delaunay(inst.b, inst.alpha, 6));
  }
}
BENCHMARK(BM_ExhaustiveBox)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

void BM_MaximalElements(benchmark::State& state) {
  checks::Rng rng(17);
  checks::RandomCurveOptions options;
  options.min_h1 = options.max_h1 = static_cast<int>(state.range(0));
  const auto curve = checks::random_curve(rng, options);
  const auto basis = cycle_basis(curve);
  const auto bsym = symbolic_period_matrix(basis);
  const auto alpha = checks::random_alpha(rng, basis.rank());
  for (auto _ : state) benchmark::DoNotOptimize(maximal_elements(bsym, alpha, 1));
}
BENCHMARK(BM_MaximalElements)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

}  // namespace
