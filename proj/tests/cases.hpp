#pragma once

// Random inputs shared by the unit tests and the acceptance binary.

#include <algorithm>
#include <random>

#include "oracle/qclif_oracle.hpp"
#include "qclif/datapath.hpp"
#include "test_util.hpp"

namespace cases {

// One neuron step at apical width `width`; about a third of the cases
// overflow some register.
inline oracle::NeuronIn random_neuron(std::mt19937_64 &g, int width) {
  using testutil::uniform_in;
  oracle::NeuronIn in;
  in.apical_width = width;
  in.somatic_width = 2 * width + 2;
  const int ww = std::min(width, 8);
  const auto n_ctx = static_cast<std::size_t>(uniform_in(g, 0, 12));
  const auto n_stim = static_cast<std::size_t>(uniform_in(g, 0, 24));
  const auto n_rec = static_cast<std::size_t>(uniform_in(g, 0, 8));
  const double p = std::uniform_real_distribution<double>(0.0, 0.6)(g);
  auto bits = [&](std::size_t n) {
    const auto s = testutil::random_spikes(g, n, p);
    return std::vector<std::uint8_t>(s.bits().begin(), s.bits().end());
  };
  auto weights = [&](std::size_t n) {
    std::vector<std::int64_t> w(n);
    for (auto &x : w)
      x = uniform_in(g, qclif::signed_min(ww), qclif::signed_max(ww));
    return w;
  };
  in.context = bits(n_ctx);
  in.stimulus = bits(n_stim);
  in.previous = bits(n_rec);
  in.w_context = weights(n_ctx);
  in.w_soma = weights(n_stim);
  in.w_recurrent = weights(n_rec);
  in.v_apical = uniform_in(g, 0, qclif::signed_max(width));
  in.v_somatic = uniform_in(g, 0, qclif::signed_max(in.somatic_width));
  in.alpha = uniform_in(g, 0, qclif::signed_max(width) / 4);
  in.beta = uniform_in(g, 0, qclif::signed_max(in.somatic_width) / 8);
  in.threshold = uniform_in(g, 0, qclif::signed_max(in.somatic_width));
  return in;
}

// The same step through the library's scalar kernels.
inline std::optional<oracle::NeuronOut>
library_neuron(const oracle::NeuronIn &in) {
  using namespace qclif;
  auto to32 = [](const std::vector<std::int64_t> &v) {
    return std::vector<std::int32_t>(v.begin(), v.end());
  };
  const auto wc = to32(in.w_context), ws = to32(in.w_soma),
             wr = to32(in.w_recurrent);
  try {
    const auto ctx = synaptic_sum(SpikeVector(in.context), wc);
    const auto som = somatic_input(SpikeVector(in.stimulus), ws,
                                   SpikeVector(in.previous), wr);
    const auto ap = apical_step(in.v_apical, in.alpha, ctx, in.apical_width);
    const auto s = somatic_step(in.v_somatic, in.beta, ap, som, in.threshold,
                                in.apical_width, in.somatic_width);
    return oracle::NeuronOut{ap, s.v_somatic, s.spike};
  } catch (const OverflowError &) {
    return std::nullopt;
  }
}

struct Layer {
  qclif::WeightSet weights;
  std::vector<qclif::NeuronParams> params;
  qclif::EventStream context, stimulus;
  qclif::RunInputs inputs() const {
    return {&context, &stimulus, stimulus.duration, 0};
  }
};

// Up to 20 neurons, at most 500 synapses per neuron, up to 1,000 cycles.
// Registers are saturating so long runs stay defined.
inline Layer random_layer(std::mt19937_64 &g) {
  using namespace qclif;
  using testutil::uniform_in;
  Layer c;
  const auto n = static_cast<std::size_t>(uniform_in(g, 1, 20));
  const auto budget = static_cast<std::int64_t>(500 - n);
  const auto nc = static_cast<std::size_t>(uniform_in(g, 1, budget / 4));
  const auto ns = static_cast<std::size_t>(
      uniform_in(g, 1, budget - static_cast<std::int64_t>(nc)));
  const int ww = static_cast<int>(uniform_in(g, 2, 8));
  c.weights = testutil::random_weights(g, n, nc, ns, ww);
  NeuronParams p;
  p.weight_width = ww;
  const auto fan = static_cast<std::int64_t>(std::max(nc, ns + n));
  p.apical_width = std::min<int>(
      32, required_accumulator_width(fan, -signed_min(ww), true)
                  .required_width +
              static_cast<int>(uniform_in(g, 0, 3)));
  p.somatic_width = 64;
  p.overflow = OverflowPolicy::saturate;
  p.alpha_leak = uniform_in(g, 0, 20);
  p.beta_leak = uniform_in(g, 0, 500);
  p.v_threshold = uniform_in(g, 0, 5000);
  c.params = broadcast(p, n);
  const auto cycles = static_cast<std::uint64_t>(uniform_in(g, 1, 1000));
  c.context = testutil::random_stream(g, static_cast<std::uint32_t>(nc),
                                      cycles, 0.2);
  c.stimulus = testutil::random_stream(g, static_cast<std::uint32_t>(ns),
                                       cycles, 0.1);
  return c;
}

} // namespace cases
