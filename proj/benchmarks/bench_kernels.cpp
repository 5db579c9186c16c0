#include <benchmark/benchmark.h>

#include "proxpool/kernels.hpp"
#include "proxpool/pooling.hpp"
#include "proxpool/synth.hpp"

#include <random>

namespace {

using namespace proxpool;

// Ring with random chords; connected for any n >= 3.
Matrix chorded_ring(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  Matrix a = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index j = (i + 1) % n;
    a(i, j) = a(j, i) = 1.0;
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index i = pick(rng), j = pick(rng);
    if (i != j) a(i, j) = a(j, i) = 1.0;
  }
  return a;
}

void BM_StructureKernelPolynomial(benchmark::State& state) {
  const Matrix a = chorded_ring(state.range(0), 7);
  const int s = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(structure_kernel(a, s).matrix.data());
}
BENCHMARK(BM_StructureKernelPolynomial)
    ->ArgNames({"n", "s"})
    ->ArgsProduct({{32, 128, 512}, {1, 2, 4}})
    ->Unit(benchmark::kMicrosecond);

void BM_StructureKernelSpectral(benchmark::State& state) {
  const Matrix a = chorded_ring(state.range(0), 7);
  const int s = static_cast<int>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(structure_kernel_oracle(a, s, 4096).matrix.data());
  }
}
BENCHMARK(BM_StructureKernelSpectral)
    ->ArgNames({"n", "s"})
    ->ArgsProduct({{32, 128, 512}, {1, 2, 4}})
    ->Unit(benchmark::kMicrosecond);

void BM_Sparsemax(benchmark::State& state) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> z(0.0, 1.0);
  Vector v(state.range(0));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = z(rng);
  for (auto _ : state) benchmark::DoNotOptimize(sparsemax(v).data());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Sparsemax)->RangeMultiplier(4)->Range(8, 2048);

void BM_PoolGraph(benchmark::State& state) {
  const Dataset d = synth_dataset(20, 3);
  const Graph& g = d.graphs.front();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  Matrix proj(static_cast<Eigen::Index>(g.feature_dim()), 3);
  for (Eigen::Index k = 0; k < proj.size(); ++k) proj.data()[k] = u(rng);
  PoolingOptions options;
  options.variant = static_cast<Variant>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(pool_graph(g, proj, options).coarsened.graph.features.data());
  }
  state.SetLabel(std::string(to_string(options.variant)));
}
BENCHMARK(BM_PoolGraph)->DenseRange(0, 2)->Unit(benchmark::kMicrosecond);

}  // namespace
