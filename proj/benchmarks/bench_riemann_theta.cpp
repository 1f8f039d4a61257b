#include "tropkp/checks/bundled.hpp"
#include "tropkp/checks/random_instances.hpp"
#include "tropkp/degeneration.hpp"
#include "tropkp/riemann_theta.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace tropkp;

void BM_Theta(benchmark::State& state) {
  checks::Rng rng(29);
  const int g = static_cast<int>(state.range(0));
  const SiegelMatrix z(checks::random_siegel(rng, g));
  ComplexVector w(g);
  for (int i = 0; i < g; ++i) w(i) = checks::random_complex(rng, -0.5, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(theta(z, w));
}
BENCHMARK(BM_Theta)->DenseRange(1, 5);

void BM_ThetaDerivative(benchmark::State& state) {
  checks::Rng rng(31);
  const int g = static_cast<int>(state.range(0));
  const SiegelMatrix z(checks::random_siegel(rng, g));
  ComplexVector w(g);
  for (int i = 0; i < g; ++i) w(i) = checks::random_complex(rng, -0.5, 0.5);
  std::vector<int> order(static_cast<std::size_t>(g), 0);
  order[0] = 4;
  for (auto _ : state) benchmark::DoNotOptimize(theta_derivative(z, w, order));
}
BENCHMARK(BM_ThetaDerivative)->DenseRange(1, 4);

// Theta along the degeneration: Im Z(s) grows like -log s.
void BM_ThetaDegenerating(benchmark::State& state) {
  const auto p = checks::build_pipeline(checks::bundled_example("two_loops"));
  const auto family = assemble_family(p.bc, p.data);
  const double s = std::pow(10.0, -static_cast<double>(state.range(0)));
  const SiegelMatrix z = family.siegel_at(s);
  const auto alpha = checks::bundled_example("two_loops").alpha;
  const ComplexVector w = checks::bundled_example("two_loops").c + family.shift(alpha, s);
  for (auto _ : state) benchmark::DoNotOptimize(theta(z, w));
}
BENCHMARK(BM_ThetaDegenerating)->DenseRange(1, 7, 2);

}  // namespace
