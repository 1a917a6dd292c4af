#include "qclif/layer.hpp"

#include <algorithm>
#include <exception>
#include <string>

namespace qclif {

namespace {

void check_dimensions(const LayerState &state, const WeightSet &weights,
                      std::span<const NeuronParams> params,
                      const SpikeVector &context_spikes,
                      const SpikeVector &stimulus_spikes) {
  const auto n = weights.neuron_count();
  if (weights.context.rows() != n || weights.recurrent.rows() != n ||
      weights.recurrent.cols() != n)
    throw DimensionMismatch("weight matrices disagree on neuron count");
  if (state.v_apical.size() != n || state.v_somatic.size() != n ||
      state.prev_spikes.size() != n)
    throw DimensionMismatch("state holds " + std::to_string(state.size()) +
                            " neurons, weights " + std::to_string(n));
  if (params.size() != n)
    throw DimensionMismatch("expected " + std::to_string(n) +
                            " neuron parameter sets, got " +
                            std::to_string(params.size()));
  if (context_spikes.size() != weights.context_inputs())
    throw DimensionMismatch("context spike vector length");
  if (stimulus_spikes.size() != weights.stimulus_inputs())
    throw DimensionMismatch("stimulus spike vector length");
}

std::int64_t sum_active(std::span<const std::uint32_t> active,
                        std::span<const std::int32_t> row) noexcept {
  std::int64_t s = 0;
  for (auto i : active)
    s += row[i];
  return s;
}

} // namespace

StepResult layer_step_serial(const LayerState &state, const WeightSet &weights,
                             std::span<const NeuronParams> params,
                             const SpikeVector &context_spikes,
                             const SpikeVector &stimulus_spikes) {
  check_dimensions(state, weights, params, context_spikes, stimulus_spikes);
  const auto n = weights.neuron_count();
  StepResult r{LayerState::zeros(n), SpikeVector(n)};
  for (std::size_t j = 0; j < n; ++j) {
    const auto &p = params[j];
    const auto ctx = synaptic_sum(context_spikes, weights.context.row(j));
    const auto som =
        somatic_input(stimulus_spikes, weights.soma.row(j), state.prev_spikes,
                      weights.recurrent.row(j));
    const auto ap = apical_step(state.v_apical[j], p.alpha_leak, ctx,
                                p.apical_width, p.overflow);
    const auto sr =
        somatic_step(state.v_somatic[j], p.beta_leak, ap, som, p.v_threshold,
                     p.apical_width, p.somatic_width, p.overflow);
    r.state.v_apical[j] = ap;
    r.state.v_somatic[j] = sr.v_somatic;
    r.output.set(j, sr.spike);
  }
  r.state.prev_spikes = r.output;
  r.state.cycle = state.cycle + 1;
  return r;
}

StepResult layer_step(const LayerState &state, const WeightSet &weights,
                      std::span<const NeuronParams> params,
                      const SpikeVector &context_spikes,
                      const SpikeVector &stimulus_spikes) {
  check_dimensions(state, weights, params, context_spikes, stimulus_spikes);
  const auto n = static_cast<std::int64_t>(weights.neuron_count());
  const auto ctx_active = context_spikes.active();
  const auto stim_active = stimulus_spikes.active();
  const auto rec_active = state.prev_spikes.active();

  StepResult r{LayerState::zeros(static_cast<std::size_t>(n)),
               SpikeVector(static_cast<std::size_t>(n))};
  std::vector<std::uint8_t> fired(static_cast<std::size_t>(n), 0);

  // Exceptions cannot cross the parallel region; keep the lowest-index one so
  // the error matches the serial kernel.
  std::exception_ptr failure;
  std::int64_t failed_at = n;

#pragma omp parallel for schedule(static)
  for (std::int64_t jj = 0; jj < n; ++jj) {
    const auto j = static_cast<std::size_t>(jj);
    try {
      const auto &p = params[j];
      const auto ctx = sum_active(ctx_active, weights.context.row(j));
      const auto som = sum_active(stim_active, weights.soma.row(j)) +
                       sum_active(rec_active, weights.recurrent.row(j));
      const auto ap = apical_step(state.v_apical[j], p.alpha_leak, ctx,
                                  p.apical_width, p.overflow);
      const auto sr =
          somatic_step(state.v_somatic[j], p.beta_leak, ap, som,
                       p.v_threshold, p.apical_width, p.somatic_width,
                       p.overflow);
      r.state.v_apical[j] = ap;
      r.state.v_somatic[j] = sr.v_somatic;
      fired[j] = sr.spike;
    } catch (...) {
#pragma omp critical(qclif_layer_failure)
      if (jj < failed_at) {
        failed_at = jj;
        failure = std::current_exception();
      }
    }
  }
  if (failure)
    std::rethrow_exception(failure);

  r.output = SpikeVector(std::move(fired));
  r.state.prev_spikes = r.output;
  r.state.cycle = state.cycle + 1;
  return r;
}

std::vector<NeuronParams> broadcast(const NeuronParams &p, std::size_t n) {
  return std::vector<NeuronParams>(n, p);
}

void check_run_inputs(const WeightSet &weights,
                      std::span<const NeuronParams> params,
                      const RunInputs &in) {
  if (!in.context || !in.stimulus)
    throw ConfigError("run needs both context and stimulus streams");
  if (in.context->channel_count != weights.context_inputs())
    throw DimensionMismatch(
        "context stream has " + std::to_string(in.context->channel_count) +
        " channels, weights expect " +
        std::to_string(weights.context_inputs()));
  if (in.stimulus->channel_count != weights.stimulus_inputs())
    throw DimensionMismatch(
        "stimulus stream has " + std::to_string(in.stimulus->channel_count) +
        " channels, weights expect " +
        std::to_string(weights.stimulus_inputs()));
  if (params.size() != weights.neuron_count())
    throw DimensionMismatch("parameter count does not match neuron count");
  int weight_width = 32;
  for (const auto &p : params) {
    p.validate();
    weight_width = std::min(weight_width, p.weight_width);
  }
  weights.validate(weight_width);
  in.context->validate();
  in.stimulus->validate();
}

SpikeRaster run_functional(const WeightSet &weights,
                           std::span<const NeuronParams> params,
                           const RunInputs &in, Kernel kernel) {
  check_run_inputs(weights, params, in);
  const auto n = weights.neuron_count();
  auto raster = SpikeRaster::empty(n, in.cycles);
  StreamCursor ctx(*in.context), stim(*in.stimulus);
  auto state = LayerState::zeros(n);
  for (std::uint64_t t = 0; t < in.cycles; ++t) {
    if (in.trial_length && t % in.trial_length == 0)
      state = LayerState::zeros(n);
    const auto &c = ctx.at(t);
    const auto &s = stim.at(t);
    auto step = kernel == Kernel::parallel
                    ? layer_step(state, weights, params, c, s)
                    : layer_step_serial(state, weights, params, c, s);
    const auto out = step.output.bits();
    std::copy(out.begin(), out.end(), raster.bits.begin() + t * n);
    state = std::move(step.state);
  }
  return raster;
}

// ---- real-valued pathway ----

RealLayerState RealLayerState::zeros(std::size_t neurons) {
  return {std::vector<double>(neurons, 0.0), std::vector<double>(neurons, 0.0),
          SpikeVector(neurons)};
}

SpikeVector layer_step_real(RealLayerState &state, const RealWeightSet &weights,
                            std::span<const RealNeuronParams> params,
                            const SpikeVector &context_spikes,
                            const SpikeVector &stimulus_spikes) {
  const auto n = weights.neuron_count();
  if (params.size() != n || state.v_somatic.size() != n ||
      context_spikes.size() != weights.context.cols() ||
      stimulus_spikes.size() != weights.soma.cols())
    throw DimensionMismatch("real-valued layer dimensions");
  const auto ctx_active = context_spikes.active();
  const auto stim_active = stimulus_spikes.active();
  const auto rec_active = state.prev_spikes.active();
  SpikeVector out(n);
  for (std::size_t j = 0; j < n; ++j) {
    double ctx = 0.0, som = 0.0;
    for (auto i : ctx_active)
      ctx += weights.context(j, i);
    for (auto i : stim_active)
      som += weights.soma(j, i);
    for (auto i : rec_active)
      som += weights.recurrent(j, i);
    const auto &p = params[j];
    double ap = state.v_apical[j] - p.alpha_leak + ctx;
    if (ap < 0.0)
      ap = 0.0;
    double vs = state.v_somatic[j] - p.beta_leak + (ap > 0.0 ? ap : 0.0) * som;
    if (vs < 0.0)
      vs = 0.0;
    const bool spike = vs >= p.v_threshold;
    state.v_apical[j] = ap;
    state.v_somatic[j] = spike ? 0.0 : vs;
    out.set(j, spike);
  }
  state.prev_spikes = out;
  return out;
}

SpikeRaster run_real(const RealWeightSet &weights,
                     std::span<const RealNeuronParams> params,
                     const RunInputs &in) {
  if (!in.context || !in.stimulus)
    throw ConfigError("run needs both context and stimulus streams");
  const auto n = weights.neuron_count();
  auto raster = SpikeRaster::empty(n, in.cycles);
  StreamCursor ctx(*in.context), stim(*in.stimulus);
  auto state = RealLayerState::zeros(n);
  for (std::uint64_t t = 0; t < in.cycles; ++t) {
    if (in.trial_length && t % in.trial_length == 0)
      state = RealLayerState::zeros(n);
    const auto out =
        layer_step_real(state, weights, params, ctx.at(t), stim.at(t));
    std::copy(out.bits().begin(), out.bits().end(),
              raster.bits.begin() + t * n);
  }
  return raster;
}

} // namespace qclif
