#include <benchmark/benchmark.h>

#include "proxpool/network.hpp"
#include "proxpool/synth.hpp"
#include "proxpool/trainer.hpp"

namespace {

using namespace proxpool;

const Dataset& dataset() {
  static const Dataset d = synth_dataset(64, 1);
  return d;
}

void BM_Forward(benchmark::State& state) {
  const Dataset& d = dataset();
  const ProxPoolNet net = init_network(model_config_for(d), 2);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(forward(d.graphs[i % d.size()], net).logits.data());
    ++i;
  }
}
BENCHMARK(BM_Forward)->Unit(benchmark::kMicrosecond);

void BM_ForwardBackward(benchmark::State& state) {
  const Dataset& d = dataset();
  const ProxPoolNet net = init_network(model_config_for(d), 2);
  std::size_t i = 0;
  for (auto _ : state) {
    diff::GradientMap grads;
    benchmark::DoNotOptimize(forward(d.graphs[i % d.size()], net, &grads).loss);
    ++i;
  }
}
BENCHMARK(BM_ForwardBackward)->Unit(benchmark::kMicrosecond);

}  // namespace
