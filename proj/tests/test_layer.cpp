#include <random>

#include <gtest/gtest.h>

#include "oracle/qclif_oracle.hpp"
#include "qclif/layer.hpp"
#include "test_util.hpp"

using namespace qclif;

namespace {

std::vector<std::int64_t> widen(std::span<const std::int32_t> r) {
  return {r.begin(), r.end()};
}

std::vector<std::uint8_t> bytes(const SpikeVector &s) {
  return {s.bits().begin(), s.bits().end()};
}

// Layer step assembled from the per-neuron oracle.
std::optional<LayerState> oracle_layer(const LayerState &st,
                                       const WeightSet &w,
                                       const std::vector<NeuronParams> &p,
                                       const SpikeVector &ctx,
                                       const SpikeVector &stim) {
  LayerState next = LayerState::zeros(st.size());
  next.cycle = st.cycle + 1;
  for (std::size_t i = 0; i < st.size(); ++i) {
    oracle::NeuronIn in{st.v_apical[i], st.v_somatic[i], p[i].alpha_leak,
                        p[i].beta_leak, p[i].v_threshold, p[i].apical_width,
                        p[i].somatic_width, bytes(ctx), bytes(stim),
                        bytes(st.prev_spikes), widen(w.context.row(i)),
                        widen(w.soma.row(i)), widen(w.recurrent.row(i))};
    const auto out = oracle::step(in);
    if (!out)
      return std::nullopt;
    next.v_apical[i] = out->v_apical;
    next.v_somatic[i] = out->v_somatic;
    next.prev_spikes.set(i, out->spike);
  }
  return next;
}

NeuronParams wide_params() {
  NeuronParams p;
  p.alpha_leak = 3;
  p.beta_leak = 50;
  p.v_threshold = 2000;
  p.apical_width = 20;
  p.somatic_width = 48;
  return p;
}

} // namespace

TEST(Layer, QuiescentInputsStayAtZero) {
  std::mt19937_64 g(1);
  const auto w = testutil::random_weights(g, 6, 4, 9, 8);
  const auto p = broadcast(wide_params(), 6);
  auto st = LayerState::zeros(6);
  for (int t = 0; t < 50; ++t) {
    auto r = layer_step(st, w, p, SpikeVector(4), SpikeVector(9));
    EXPECT_EQ(r.output.count(), 0u);
    st = std::move(r.state);
  }
  EXPECT_EQ(st.v_apical, std::vector<std::int64_t>(6, 0));
  EXPECT_EQ(st.v_somatic, std::vector<std::int64_t>(6, 0));
}

TEST(Layer, ZeroThresholdFiresEveryCycle) {
  WeightSet w{Matrix<std::int32_t>(1, 1), Matrix<std::int32_t>(1, 1),
              Matrix<std::int32_t>(1, 1)};
  NeuronParams p = wide_params();
  p.v_threshold = 0;
  const auto ps = broadcast(p, 1);
  auto st = LayerState::zeros(1);
  for (int t = 0; t < 20; ++t) {
    auto r = layer_step(st, w, ps, SpikeVector(1), SpikeVector(1));
    EXPECT_TRUE(r.output[0]);
    EXPECT_EQ(r.state.v_somatic[0], 0);
    st = std::move(r.state);
  }
}

TEST(Layer, RecurrentImpulseArrivesOneCycleLater) {
  // Neuron 0 is driven to fire at t=0; neuron 1 only listens to neuron 0.
  WeightSet w{Matrix<std::int32_t>(2, 1, 10), Matrix<std::int32_t>(2, 1),
              Matrix<std::int32_t>(2, 2)};
  w.soma(0, 0) = 10;
  w.recurrent(1, 0) = 10;
  NeuronParams p;
  p.alpha_leak = 0;
  p.beta_leak = 0;
  p.v_threshold = 50;
  const auto ps = broadcast(p, 2);
  SpikeVector ctx(1), stim(1), none(1);
  ctx.set(0);
  stim.set(0);
  auto r0 = layer_step(LayerState::zeros(2), w, ps, ctx, stim);
  EXPECT_TRUE(r0.output[0]);
  EXPECT_FALSE(r0.output[1]);
  auto r1 = layer_step(r0.state, w, ps, SpikeVector(1), none);
  EXPECT_FALSE(r1.output[0]);
  EXPECT_TRUE(r1.output[1]);
  EXPECT_EQ(r1.state.cycle, 2u);
}

TEST(Layer, ContextGatesStimulus) {
  // Same stimulus, context on only inside cycles [5, 10).
  WeightSet w{Matrix<std::int32_t>(1, 1, 20), Matrix<std::int32_t>(1, 1, 5),
              Matrix<std::int32_t>(1, 1)};
  NeuronParams p;
  p.alpha_leak = 10;
  p.beta_leak = 1;
  p.v_threshold = 30;
  const auto ps = broadcast(p, 1);
  auto st = LayerState::zeros(1);
  SpikeVector stim(1);
  stim.set(0);
  std::vector<bool> fired;
  for (int t = 0; t < 20; ++t) {
    SpikeVector ctx(1);
    ctx.set(0, t >= 5 && t < 10);
    auto r = layer_step(st, w, ps, ctx, stim);
    fired.push_back(r.output[0]);
    st = std::move(r.state);
  }
  // The apical potential peaks at 50 and drains by 10 per cycle, so the gate
  // stays open four cycles past the context window.
  for (int t = 0; t < 20; ++t)
    EXPECT_EQ(fired[t], t >= 5 && t < 14) << t;
}

TEST(Layer, RandomLayerMatchesOracle) {
  std::mt19937_64 g(77);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t n = 10, nc = 6, ns = 20;
    const auto w = testutil::random_weights(g, n, nc, ns, 8);
    const auto p = broadcast(wide_params(), n);
    auto st = LayerState::zeros(n);
    std::uint64_t spikes = 0;
    for (int t = 0; t < 100; ++t) {
      const auto ctx = testutil::random_spikes(g, nc, 0.3);
      const auto stim = testutil::random_spikes(g, ns, 0.2);
      const auto want = oracle_layer(st, w, p, ctx, stim);
      ASSERT_TRUE(want.has_value());
      auto got = layer_step(st, w, p, ctx, stim);
      ASSERT_EQ(got.state, *want) << "cycle " << t;
      EXPECT_EQ(got.output, want->prev_spikes);
      spikes += got.output.count();
      st = std::move(got.state);
    }
    EXPECT_GT(spikes, 0u);
  }
}

TEST(Layer, ParallelMatchesSerial) {
  std::mt19937_64 g(78);
  for (int trial = 0; trial < 10; ++trial) {
    const auto n = static_cast<std::size_t>(testutil::uniform_in(g, 1, 40));
    const auto nc = static_cast<std::size_t>(testutil::uniform_in(g, 1, 16));
    const auto ns = static_cast<std::size_t>(testutil::uniform_in(g, 1, 64));
    const auto w = testutil::random_weights(g, n, nc, ns, 6);
    auto p = broadcast(wide_params(), n);
    for (auto &q : p)
      q.v_threshold = testutil::uniform_in(g, 0, 3000);
    auto a = LayerState::zeros(n), b = a;
    for (int t = 0; t < 60; ++t) {
      const auto ctx = testutil::random_spikes(g, nc, 0.3);
      const auto stim = testutil::random_spikes(g, ns, 0.3);
      auto ra = layer_step(a, w, p, ctx, stim);
      auto rb = layer_step_serial(b, w, p, ctx, stim);
      ASSERT_EQ(ra.state, rb.state);
      ASSERT_EQ(ra.output, rb.output);
      a = std::move(ra.state);
      b = std::move(rb.state);
    }
  }
}

TEST(Layer, OverflowReportedByBothKernels) {
  WeightSet w{Matrix<std::int32_t>(3, 4, 100), Matrix<std::int32_t>(3, 2),
              Matrix<std::int32_t>(3, 3)};
  NeuronParams p;
  p.apical_width = 8;
  p.alpha_leak = 0;
  const auto ps = broadcast(p, 3);
  SpikeVector ctx(4);
  for (int i = 0; i < 4; ++i)
    ctx.set(i);
  EXPECT_THROW(layer_step(LayerState::zeros(3), w, ps, ctx, SpikeVector(2)),
               OverflowError);
  EXPECT_THROW(
      layer_step_serial(LayerState::zeros(3), w, ps, ctx, SpikeVector(2)),
      OverflowError);
}

TEST(Layer, DimensionMismatch) {
  std::mt19937_64 g(3);
  const auto w = testutil::random_weights(g, 3, 2, 5, 8);
  const auto p = broadcast(wide_params(), 3);
  EXPECT_THROW(layer_step(LayerState::zeros(3), w, p, SpikeVector(3),
                          SpikeVector(5)),
               DimensionMismatch);
  EXPECT_THROW(layer_step(LayerState::zeros(4), w, p, SpikeVector(2),
                          SpikeVector(5)),
               DimensionMismatch);
}

TEST(Layer, StateInvariantsUnderFuzz) {
  std::mt19937_64 g(99);
  const std::size_t n = 12, nc = 5, ns = 30;
  const auto w = testutil::random_weights(g, n, nc, ns, 8);
  auto p = broadcast(wide_params(), n);
  p[0].v_threshold = 0;
  auto st = LayerState::zeros(n);
  for (int t = 0; t < 5000; ++t) {
    const auto ctx = testutil::random_spikes(g, nc, 0.4);
    const auto stim = testutil::random_spikes(g, ns, 0.3);
    auto r = layer_step(st, w, p, ctx, stim);
    for (std::size_t i = 0; i < n; ++i) {
      ASSERT_GE(r.state.v_apical[i], 0);
      ASSERT_GE(r.state.v_somatic[i], 0);
      if (r.output[i])
        ASSERT_EQ(r.state.v_somatic[i], 0);
    }
    ASSERT_EQ(r.state.prev_spikes, r.output);
    st = std::move(r.state);
  }
}

TEST(Layer, RunIsDeterministicAndResetsTrials) {
  std::mt19937_64 g(5);
  const auto w = testutil::random_weights(g, 8, 4, 16, 8);
  const auto p = broadcast(wide_params(), 8);
  const auto ctx = testutil::random_stream(g, 4, 300, 0.3);
  const auto stim = testutil::random_stream(g, 16, 300, 0.3);
  const RunInputs in{&ctx, &stim, 300, 0};
  const auto a = run_functional(w, p, in);
  EXPECT_EQ(a, run_functional(w, p, in));
  EXPECT_EQ(a, run_functional(w, p, in, Kernel::serial));

  // With resets, each 100-cycle window equals a fresh run on that window.
  const RunInputs trial_in{&ctx, &stim, 300, 100};
  const auto r = run_functional(w, p, trial_in);
  EventStream c2{{}, 4, 100}, s2{{}, 16, 100};
  for (auto e : ctx.events)
    if (e.timestep >= 100 && e.timestep < 200)
      c2.events.push_back({e.timestep - 100, e.channel});
  for (auto e : stim.events)
    if (e.timestep >= 100 && e.timestep < 200)
      s2.events.push_back({e.timestep - 100, e.channel});
  const auto fresh = run_functional(w, p, {&c2, &s2, 100, 0});
  for (std::uint64_t t = 0; t < 100; ++t)
    for (std::size_t i = 0; i < 8; ++i)
      EXPECT_EQ(r.at(t + 100, i), fresh.at(t, i));
}

TEST(RealLayer, MatchesIntegerLayerOnIntegralValues) {
  std::mt19937_64 g(6);
  const auto w = testutil::random_weights(g, 5, 3, 8, 6);
  const auto p = broadcast(wide_params(), 5);
  RealWeightSet rw{Matrix<double>(5, 3), Matrix<double>(5, 8),
                   Matrix<double>(5, 5)};
  for (std::size_t i = 0; i < w.context.data().size(); ++i)
    rw.context.data()[i] = w.context.data()[i];
  for (std::size_t i = 0; i < w.soma.data().size(); ++i)
    rw.soma.data()[i] = w.soma.data()[i];
  for (std::size_t i = 0; i < w.recurrent.data().size(); ++i)
    rw.recurrent.data()[i] = w.recurrent.data()[i];
  const std::vector<RealNeuronParams> rp(
      5, {static_cast<double>(p[0].alpha_leak),
          static_cast<double>(p[0].beta_leak),
          static_cast<double>(p[0].v_threshold)});
  const auto ctx = testutil::random_stream(g, 3, 200, 0.4);
  const auto stim = testutil::random_stream(g, 8, 200, 0.4);
  const RunInputs in{&ctx, &stim, 200, 0};
  EXPECT_EQ(run_real(rw, rp, in), run_functional(w, p, in));
}
