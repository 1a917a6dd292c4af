#include "qclif/task.hpp"

#include <algorithm>

#include "qclif/rng.hpp"

namespace qclif {

namespace {

constexpr double kContextOwn = 1.2, kContextOther = -1.0, kContextSigma = 0.2;
constexpr double kSomaOwn = 0.06, kSomaOther = -0.02, kSomaSigma = 0.03;
constexpr double kRecurrentSigma = 0.01;
constexpr RealNeuronParams kParams{0.25, 0.02, 1.0};

double clamp_to(double x, double lim) { return std::clamp(x, -lim, lim); }

} // namespace

std::vector<std::uint64_t> trial_spike_counts(const SpikeRaster &raster,
                                              std::uint64_t trial_length) {
  if (trial_length == 0)
    throw ConfigError("trial length must be positive");
  std::vector<std::uint64_t> counts(raster.cycles / trial_length, 0);
  for (std::uint64_t t = 0; t < counts.size() * trial_length; ++t)
    for (std::size_t j = 0; j < raster.neuron_count; ++j)
      counts[t / trial_length] += raster.at(t, j);
  return counts;
}

double task_accuracy(const SynthTask &task, const SpikeRaster &raster) {
  const auto counts = trial_spike_counts(raster, task.trial_length());
  if (counts.size() != task.trials())
    throw DimensionMismatch("raster does not cover every trial");
  std::size_t correct = 0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const bool predicted =
        static_cast<double>(counts[k]) >= task.decision_threshold;
    correct += predicted == (task.labels[k] != 0);
  }
  return static_cast<double>(correct) / static_cast<double>(counts.size());
}

SynthTask synth_context_task(const SynthTaskOptions &options) {
  if (options.classes < 2)
    throw ConfigError("synthetic task needs at least two classes");
  if (options.channels_per_class == 0 || options.neurons_per_class == 0 ||
      options.trial_length == 0 || options.repeats == 0)
    throw ConfigError("synthetic task sizes must be positive");

  SynthTask task;
  task.options = options;
  const auto C = options.classes;
  const auto channels = C * options.channels_per_class;
  const auto neurons = static_cast<std::size_t>(C) * options.neurons_per_class;
  const auto T = options.trial_length;
  const double p_context = options.context_rate_hz * options.dt_ms / 1000.0;

  PortableRng rng(options.seed);

  // Weights.
  auto &w = task.weights;
  w.context = Matrix<double>(neurons, C);
  w.soma = Matrix<double>(neurons, channels);
  w.recurrent = Matrix<double>(neurons, neurons);
  for (std::size_t j = 0; j < neurons; ++j) {
    const auto own = static_cast<std::uint32_t>(j / options.neurons_per_class);
    for (std::uint32_t c = 0; c < C; ++c)
      w.context(j, c) = clamp_to(
          rng.normal(c == own ? kContextOwn : kContextOther, kContextSigma),
          2.0);
    for (std::uint32_t ch = 0; ch < channels; ++ch)
      w.soma(j, ch) =
          clamp_to(rng.normal(ch / options.channels_per_class == own
                                  ? kSomaOwn
                                  : kSomaOther,
                              kSomaSigma),
                   0.5);
    for (std::size_t i = 0; i < neurons; ++i)
      w.recurrent(j, i) = clamp_to(rng.normal(0.0, kRecurrentSigma), 0.5);
  }
  task.params.assign(neurons, kParams);

  // Trials: every (stimulus class, context class) pair, `repeats` times.
  task.stimulus.channel_count = channels;
  task.context.channel_count = C;
  std::vector<double> p_stim(channels), p_ctx(C);
  std::uint64_t trial = 0;
  for (std::uint32_t rep = 0; rep < options.repeats; ++rep)
    for (std::uint32_t a = 0; a < C; ++a)
      for (std::uint32_t b = 0; b < C; ++b, ++trial) {
        for (std::uint32_t ch = 0; ch < channels; ++ch)
          p_stim[ch] = ch / options.channels_per_class == a ? options.p_signal
                                                            : options.p_noise;
        for (std::uint32_t c = 0; c < C; ++c)
          p_ctx[c] = c == b ? p_context : 0.0;
        const auto offset = static_cast<std::uint32_t>(trial * T);
        for (const auto &e : bernoulli_stream(p_stim, T, rng.next()).events)
          task.stimulus.events.push_back({e.timestep + offset, e.channel});
        for (const auto &e : bernoulli_stream(p_ctx, T, rng.next()).events)
          task.context.events.push_back({e.timestep + offset, e.channel});
        task.labels.push_back(a == b);
        task.stimulus_class.push_back(a);
        task.context_class.push_back(b);
      }
  task.stimulus.duration = task.context.duration = trial * T;

  // Calibrate the decision threshold at full precision: the cut between two
  // adjacent distinct trial counts that classifies the most trials, first
  // one on ties. For separable counts this is the midpoint of the gap.
  const auto raster = run_real(task.weights, task.params, task.inputs());
  const auto counts = trial_spike_counts(raster, T);
  std::vector<std::uint64_t> levels(counts.begin(), counts.end());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  std::vector<double> cuts{static_cast<double>(levels.front()) - 0.5};
  for (std::size_t i = 1; i < levels.size(); ++i)
    cuts.push_back(static_cast<double>(levels[i - 1] + levels[i]) / 2.0);
  cuts.push_back(static_cast<double>(levels.back()) + 0.5);
  std::size_t best = 0;
  for (double cut : cuts) {
    std::size_t correct = 0;
    for (std::size_t k = 0; k < counts.size(); ++k)
      correct += (static_cast<double>(counts[k]) >= cut) == (task.labels[k] != 0);
    if (correct > best) {
      best = correct;
      task.decision_threshold = cut;
    }
  }
  return task;
}

} // namespace qclif
