// Parallel layer kernel against the serial reference on random layers.

#include <random>

#include <benchmark/benchmark.h>

#include "qclif/layer.hpp"

namespace {

using namespace qclif;

struct Fixture {
  WeightSet weights;
  std::vector<NeuronParams> params;
  std::vector<SpikeVector> context, stimulus;
};

Fixture make_fixture(std::size_t neurons, std::size_t stimulus) {
  std::mt19937_64 g(1);
  std::uniform_int_distribution<std::int32_t> w(-128, 127);
  auto fill = [&](std::size_t r, std::size_t c) {
    Matrix<std::int32_t> m(r, c);
    for (auto &x : m.data())
      x = w(g);
    return m;
  };
  Fixture f{{fill(neurons, 10), fill(neurons, stimulus),
             fill(neurons, neurons)},
            {},
            {},
            {}};
  NeuronParams p;
  p.apical_width = 20;
  p.somatic_width = 48;
  p.overflow = OverflowPolicy::saturate;
  p.v_threshold = 5000;
  f.params = broadcast(p, neurons);
  std::bernoulli_distribution spike(0.05);
  for (int t = 0; t < 256; ++t) {
    SpikeVector c(10), s(stimulus);
    for (std::size_t i = 0; i < 10; ++i)
      c.set(i, spike(g));
    for (std::size_t i = 0; i < stimulus; ++i)
      s.set(i, spike(g));
    f.context.push_back(std::move(c));
    f.stimulus.push_back(std::move(s));
  }
  return f;
}

template <bool Parallel> void BM_LayerStep(benchmark::State &state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto f = make_fixture(n, n);
  auto st = LayerState::zeros(n);
  std::size_t t = 0;
  for (auto _ : state) {
    auto r = Parallel ? layer_step(st, f.weights, f.params, f.context[t & 255],
                                   f.stimulus[t & 255])
                      : layer_step_serial(st, f.weights, f.params,
                                          f.context[t & 255],
                                          f.stimulus[t & 255]);
    st = std::move(r.state);
    ++t;
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()));
  state.counters["synapses"] =
      static_cast<double>(f.weights.synapse_count());
}

} // namespace

BENCHMARK(BM_LayerStep<false>)->Name("serial")->Arg(10)->Arg(50)->Arg(200);
BENCHMARK(BM_LayerStep<true>)->Name("parallel")->Arg(10)->Arg(50)->Arg(200);

BENCHMARK_MAIN();
