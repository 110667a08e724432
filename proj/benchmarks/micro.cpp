#include <benchmark/benchmark.h>

#include "geoprec/group.hpp"
#include "geoprec/objective.hpp"
#include "geoprec/rng.hpp"
#include "geoprec/stochastic.hpp"

namespace geoprec {
namespace {

void BM_Gradient(benchmark::State& state) {
  const Index n = state.range(0);
  Rng rng(1);
  const DenseMatrix a = rng.complex_gaussian(n, n);
  const GroupScheme scheme = GroupScheme::block(Side::kLeftRight, n, n, 5);
  const GroupElement g = GroupElement::identity(scheme);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(a, g));
}
BENCHMARK(BM_Gradient)->Arg(20)->Arg(50)->Arg(100);

void BM_ExpAction(benchmark::State& state) {
  const Index n = state.range(0);
  Rng rng(2);
  const GroupScheme scheme = GroupScheme::block(Side::kLeftRight, n, n, 5);
  const GroupElement g = GroupElement::identity(scheme);
  const LieDirection h = random_direction(scheme, rng);
  for (auto _ : state) benchmark::DoNotOptimize(exp_action(g, h, 0.125));
}
BENCHMARK(BM_ExpAction)->Arg(50)->Arg(200);

void BM_HutchinsonInverse(benchmark::State& state) {
  const Index n = state.range(0);
  Rng rng(3);
  const DenseMatrix a = DenseMatrix::Identity(n, n) + 0.1 * rng.complex_gaussian(n, n) / std::sqrt(double(n));
  const LinearOperator op = LinearOperator::from_matrix(ComplexMatrix(a));
  EstimatorConfig config;
  config.num_probes = 50;
  for (auto _ : state) benchmark::DoNotOptimize(hutchinson_diagonal_inverse(op, config));
}
BENCHMARK(BM_HutchinsonInverse)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace geoprec

BENCHMARK_MAIN();
