#pragma once

#include <cstdint>
#include <vector>

#include "qclif/events.hpp"
#include "qclif/layer.hpp"

namespace qclif {

// Synthetic stand-in for a context-gated recognition task.
//
// Each class owns a block of `channels_per_class` stimulus channels and a
// block of `neurons_per_class` neurons; context channel c marks class c as
// the target. A trial shows one class's stimulus (its block fires at
// p_signal, everything else at p_noise) while the context channel of the
// target class fires at the context rate. The network should answer "the
// stimulus matches the context".
//
// Hand-set weights make a neuron's apical compartment respond only to its
// own class's context channel and its soma respond positively to its own
// stimulus block, so only matching trials produce sustained output.
struct SynthTaskOptions {
  std::uint32_t classes = 4;
  std::uint32_t channels_per_class = 16;
  std::uint32_t neurons_per_class = 5;
  std::uint64_t trial_length = 100;
  std::uint32_t repeats = 2;
  double p_signal = 0.1;
  double p_noise = 0.04;
  double context_rate_hz = 200.0;
  double dt_ms = 1.0;
  std::uint64_t seed = 1;
};

struct SynthTask {
  SynthTaskOptions options;
  EventStream stimulus; // trials back to back, trial_length cycles each
  EventStream context;
  std::vector<std::uint8_t> labels; // 1 when stimulus class == context class
  std::vector<std::uint32_t> stimulus_class;
  std::vector<std::uint32_t> context_class;
  RealWeightSet weights;
  std::vector<RealNeuronParams> params;
  // Trial predicted "match" when its total output spike count >= this.
  double decision_threshold = 0.0;

  std::size_t trials() const noexcept { return labels.size(); }
  RunInputs inputs() const {
    return {&context, &stimulus, trial_length() * trials(), trial_length()};
  }
  std::uint64_t trial_length() const noexcept { return options.trial_length; }
};

// Builds streams and weights, then calibrates decision_threshold on a
// full-precision run: the cut between trial spike counts that classifies the
// most trials (midway across the gap when matching and non-matching counts
// separate). Throws ConfigError when classes < 2.
SynthTask synth_context_task(const SynthTaskOptions &options);

// Total output spikes per trial.
std::vector<std::uint64_t> trial_spike_counts(const SpikeRaster &raster,
                                              std::uint64_t trial_length);

// Fraction of trials whose thresholded count agrees with the label.
double task_accuracy(const SynthTask &task, const SpikeRaster &raster);

} // namespace qclif
