#include <random>

#include <benchmark/benchmark.h>

#include "qcrb/qcrb.hpp"

namespace {

using namespace qcrb;

ComplexMatrix random_hermitian(Index dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  ComplexMatrix a(dim, dim);
  for (Index i = 0; i < dim; ++i) {
    for (Index j = 0; j < dim; ++j) a(i, j) = Complex(g(rng), g(rng));
  }
  return (a + a.adjoint()) / 2.0;
}

void BM_Eigendecomposition(benchmark::State& state) {
  const ComplexMatrix m = random_hermitian(state.range(0), 1);
  for (auto _ : state) benchmark::DoNotOptimize(hermitian_eigendecomposition(m));
}
BENCHMARK(BM_Eigendecomposition)->RangeMultiplier(2)->Range(4, 256);

void BM_GhzSld(benchmark::State& state) {
  const auto model = ghz::ghz_model(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sld(model, 0.3));
}
BENCHMARK(BM_GhzSld)->DenseRange(2, 8, 2);

void BM_GhzErrorPropagation(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto model = ghz::ghz_model(n);
  const auto obs = ghz::optimal_separable_observable(n, {0.0, 0.6, 0.8, 0.0});
  for (auto _ : state) benchmark::DoNotOptimize(error_propagation(model, 0.3, obs, 1000));
}
BENCHMARK(BM_GhzErrorPropagation)->DenseRange(2, 8, 2);

void BM_MixedStateSld(benchmark::State& state) {
  const Index dim = state.range(0);
  const ComplexMatrix g = random_hermitian(dim, 2);
  const ComplexMatrix a = random_hermitian(dim, 3);
  ComplexMatrix rho = a * a.adjoint();
  rho /= rho.trace().real();
  const auto model = ParametricModel::unitary(DensityMatrix(rho), HermitianObservable(g));
  for (auto _ : state) benchmark::DoNotOptimize(sld(model, 0.3));
}
BENCHMARK(BM_MixedStateSld)->RangeMultiplier(2)->Range(4, 64);

void BM_SampleShots(benchmark::State& state) {
  const auto model = ghz::ghz_model(2);
  const auto dist =
      outcome_distribution(model, 0.4, ghz::local_product_povm(2, ghz::LocalBasis::x_basis));
  const auto nu = static_cast<std::uint64_t>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_shots(dist, nu, seed++));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleShots)->RangeMultiplier(10)->Range(1000, 100000);

}  // namespace

BENCHMARK_MAIN();
