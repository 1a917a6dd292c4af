#pragma once

#include <algorithm>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "qclif/events.hpp"
#include "qclif/layer.hpp"
#include "qclif/neuron.hpp"

namespace qclif {

// Structural parameters of the hardware layer: Spike Weighting Module (SWM)
// adder trees, Apical Compartment (AC), Multiplication Unit (MU), Somatic
// Compartment (SC) and Threshold Comparator (TC).
struct DatapathConfig {
  std::size_t fan_in_context = 0;
  std::size_t fan_in_stimulus = 0;
  std::size_t neuron_count = 0;
  int weight_width = 8;   // M
  int apical_width = 16;  // N: SWM outputs, AC register, MU operands
  int product_width = 32; // 2N
  int somatic_width = 32;
  OverflowPolicy overflow = OverflowPolicy::error;

  // Somatic SWM tree sums stimulus and recurrent terms.
  std::size_t max_fan_in() const noexcept {
    return std::max(fan_in_context, fan_in_stimulus + neuron_count);
  }

  void validate() const;

  // Derives a config from layer shapes; widths come from params[0] and must
  // agree across neurons.
  static DatapathConfig for_layer(const WeightSet &weights,
                                  std::span<const NeuronParams> params);
};

class FanInExceeded : public ConfigError {
public:
  explicit FanInExceeded(const std::string &what)
      : ConfigError("fan-in exceeded: " + what) {}
};

// ceil(log3(terms)); 0 for zero or one term.
int swm_stage_count(std::size_t terms) noexcept;

struct SwmResult {
  std::int64_t sum = 0;
  int stages_used = 0;
};

// Multi-operand reduction by 3-input carry-save stages. Each stage replaces
// every group of three operands with one, so the tree depth is
// swm_stage_count(terms).
SwmResult swm_reduce(std::span<const std::int64_t> gated_weights,
                     std::size_t fan_in_limit);
SwmResult swm_reduce(std::span<const std::int64_t> gated_weights,
                     const DatapathConfig &config);

// Signed N x N array multiply with a 2N-bit result. Throws OverflowError if
// an operand does not fit N bits.
std::int64_t mu_multiply(std::int64_t apical_out, std::int64_t somatic_drive,
                         int n_bits);

// Register contents of one neuron for one cycle.
struct TraceRecord {
  std::uint64_t cycle = 0;
  std::uint32_t neuron = 0;
  std::int64_t swm_context = 0;
  std::int64_t swm_somatic = 0;
  std::int64_t apical = 0;  // AA register after the sign check
  std::int64_t product = 0; // MU output
  std::int64_t somatic = 0; // SA register after the sign check and RESET
  bool spike = false;       // TC output

  friend bool operator==(const TraceRecord &, const TraceRecord &) = default;
};

struct PipelineTrace {
  int context_stages = 0;
  int somatic_stages = 0;
  // SWM depth plus one register stage each for AC, MU and SC/TC. Bookkeeping
  // only: results are committed within the same cycle.
  int latency_stages = 0;
  std::vector<TraceRecord> records; // cycle-major, then neuron

  // Header "cycle,neuron,block,value"; blocks per record in the order
  // SWM_CON, SWM_SOM, AA, MU, SA, TC.
  void write_csv(std::ostream &os) const;
};

struct DatapathRun {
  SpikeRaster raster;
  PipelineTrace trace;
};

DatapathRun run_datapath(const DatapathConfig &config,
                         const WeightSet &weights,
                         std::span<const NeuronParams> params,
                         const RunInputs &in, bool record_trace = true);

} // namespace qclif
