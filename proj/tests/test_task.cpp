#include <gtest/gtest.h>

#include "qclif/harness.hpp"
#include "qclif/task.hpp"

using namespace qclif;

namespace {

SynthTaskOptions small_task(std::uint64_t seed) {
  SynthTaskOptions o;
  o.seed = seed;
  o.repeats = 1;
  return o;
}

} // namespace

TEST(SynthTask, ShapesAndLabels) {
  const auto t = synth_context_task(small_task(1));
  EXPECT_EQ(t.trials(), 16u);
  EXPECT_EQ(t.weights.neuron_count(), 20u);
  EXPECT_EQ(t.weights.soma.cols(), 64u);
  EXPECT_EQ(t.weights.context.cols(), 4u);
  EXPECT_EQ(t.stimulus.duration, 1600u);
  std::size_t matches = 0;
  for (std::size_t k = 0; k < t.trials(); ++k) {
    EXPECT_EQ(t.labels[k] != 0, t.stimulus_class[k] == t.context_class[k]);
    matches += t.labels[k];
  }
  EXPECT_EQ(matches, 4u);
  // Context only on the target channel.
  for (const auto &e : t.context.events)
    EXPECT_EQ(e.channel, t.context_class[e.timestep / 100]);
  EXPECT_THROW(synth_context_task({.classes = 1}), ConfigError);
}

TEST(SynthTask, Deterministic) {
  const auto a = synth_context_task(small_task(4));
  const auto b = synth_context_task(small_task(4));
  EXPECT_EQ(a.stimulus, b.stimulus);
  EXPECT_EQ(a.context, b.context);
  EXPECT_EQ(a.decision_threshold, b.decision_threshold);
}

TEST(SynthTask, FullPrecisionWellAboveChance) {
  // Matching trials are a quarter of the total, so always answering "no"
  // scores 0.75.
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto t = synth_context_task(small_task(seed));
    const auto r = run_real(t.weights, t.params, t.inputs());
    EXPECT_GE(task_accuracy(t, r), 0.85) << seed;
  }
}

TEST(SynthTask, SeparableTaskSolvedWithGapMidpoint) {
  auto o = small_task(1);
  o.p_signal = 0.25;
  o.p_noise = 0.02;
  const auto t = synth_context_task(o);
  const auto counts =
      trial_spike_counts(run_real(t.weights, t.params, t.inputs()), 100);
  std::uint64_t quietest = UINT64_MAX, busiest = 0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (t.labels[k])
      quietest = std::min(quietest, counts[k]);
    else
      busiest = std::max(busiest, counts[k]);
  }
  ASSERT_LT(busiest, quietest);
  EXPECT_EQ(t.decision_threshold, (quietest + busiest) / 2.0);
  EXPECT_EQ(task_accuracy(t, run_real(t.weights, t.params, t.inputs())), 1.0);
}

TEST(SynthTask, TrialCounts) {
  auto r = SpikeRaster::empty(2, 30);
  r.bits[0] = r.bits[11 * 2 + 1] = r.bits[12 * 2] = 1;
  EXPECT_EQ(trial_spike_counts(r, 10),
            (std::vector<std::uint64_t>{1, 2, 0}));
  EXPECT_THROW(trial_spike_counts(r, 0), ConfigError);
}

TEST(Sweep, WidthsSizedForTheTask) {
  const auto o = small_task(1);
  for (int bits : {2, 4, 8, 16}) {
    const auto w = size_task_widths(o, bits);
    EXPECT_GE(w.apical, 2);
    EXPECT_LE(w.apical, 32);
    EXPECT_LE(w.somatic, 64);
  }
  EXPECT_LE(size_task_widths(o, 4).apical, size_task_widths(o, 8).apical);
}

TEST(Sweep, RowsAndDegradation) {
  const auto t = synth_context_task(small_task(2));
  const auto rows = run_sweep(t, {0, 16, 8, 4, 2});
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0].bits, 0);
  EXPECT_GE(rows[0].neuron_accuracy, rows[2].neuron_accuracy);
  EXPECT_FALSE(rows[0].degraded);
  for (const auto &r : rows) {
    EXPECT_EQ(r.trials, 16u);
    EXPECT_GE(r.weight_neuron_accuracy, 0.0);
    EXPECT_LE(r.weight_neuron_accuracy, 1.0);
  }
  EXPECT_GE(rows[1].weight_neuron_accuracy, rows[3].weight_neuron_accuracy);
  EXPECT_THROW(run_sweep(t, {1}), ConfigError);
}
