#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qclif/events.hpp"
#include "qclif/neuron.hpp"

namespace qclif {

struct StepResult {
  LayerState state;
  SpikeVector output;
};

// One cycle of the recurrent layer. Every neuron reads the recurrent drive
// from state.prev_spikes (the previous cycle's output); the returned state
// carries this cycle's output as its prev_spikes and cycle + 1.
//
// Neurons are updated in parallel with OpenMP over precomputed active-input
// lists. Throws DimensionMismatch or OverflowError.
StepResult layer_step(const LayerState &state, const WeightSet &weights,
                      std::span<const NeuronParams> params,
                      const SpikeVector &context_spikes,
                      const SpikeVector &stimulus_spikes);

// Same contract, single-threaded and dense: a direct composition of
// somatic_input, apical_step and somatic_step per neuron. Kept as the
// reference the parallel kernel is tested against.
StepResult layer_step_serial(const LayerState &state, const WeightSet &weights,
                             std::span<const NeuronParams> params,
                             const SpikeVector &context_spikes,
                             const SpikeVector &stimulus_spikes);

enum class Kernel { parallel, serial };

// Inputs for a multi-cycle run. With trial_length > 0 the layer state is
// cleared at every multiple of trial_length.
struct RunInputs {
  const EventStream *context = nullptr;
  const EventStream *stimulus = nullptr;
  std::uint64_t cycles = 0;
  std::uint64_t trial_length = 0;
};

void check_run_inputs(const WeightSet &weights,
                      std::span<const NeuronParams> params,
                      const RunInputs &in);

SpikeRaster run_functional(const WeightSet &weights,
                           std::span<const NeuronParams> params,
                           const RunInputs &in,
                           Kernel kernel = Kernel::parallel);

// Broadcast one parameter set to n neurons.
std::vector<NeuronParams> broadcast(const NeuronParams &p, std::size_t n);

// ---- real-valued pathway ----
//
// The same linear-leak dynamics on doubles with no register limits; used as
// the full-precision baseline for quantization sweeps.

struct RealNeuronParams {
  double alpha_leak = 0.0;
  double beta_leak = 0.0;
  double v_threshold = 1.0;
};

struct RealWeightSet {
  Matrix<double> context;
  Matrix<double> soma;
  Matrix<double> recurrent;

  std::size_t neuron_count() const noexcept { return soma.rows(); }
};

struct RealLayerState {
  std::vector<double> v_apical;
  std::vector<double> v_somatic;
  SpikeVector prev_spikes;

  static RealLayerState zeros(std::size_t neurons);
};

SpikeVector layer_step_real(RealLayerState &state, const RealWeightSet &weights,
                            std::span<const RealNeuronParams> params,
                            const SpikeVector &context_spikes,
                            const SpikeVector &stimulus_spikes);

SpikeRaster run_real(const RealWeightSet &weights,
                     std::span<const RealNeuronParams> params,
                     const RunInputs &in);

} // namespace qclif
