#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "qclif/events.hpp"
#include "qclif/layer.hpp"
#include "qclif/neuron.hpp"

namespace qclif {

// Symmetric signed grid over [range_lo, range_hi]: integers in
// [-(2^(bits-1) - 1), 2^(bits-1) - 1] with step max(|lo|, |hi|) / qmax.
struct QuantizationSpec {
  int bits = 8;
  double range_lo = -0.5;
  double range_hi = 0.5;

  void validate() const;
  std::int64_t qmax() const noexcept { return (std::int64_t{1} << (bits - 1)) - 1; }
  double max_abs() const noexcept;
  double scale() const noexcept { return max_abs() / static_cast<double>(qmax()); }

  static QuantizationSpec soma(int bits) { return {bits, -0.5, 0.5}; }
  static QuantizationSpec apical(int bits) { return {bits, -2.0, 2.0}; }
  static QuantizationSpec recurrent(int bits) { return {bits, -0.5, 0.5}; }
};

// Clamp to the range, then round x * qmax / max_abs to the nearest integer,
// ties to even. Throws NonFiniteInput.
std::int64_t quantize_value(double x, const QuantizationSpec &spec);
double dequantize_value(std::int64_t q, const QuantizationSpec &spec);

WeightSet quantize_weight_set(const RealWeightSet &weights,
                              const QuantizationSpec &soma_spec,
                              const QuantizationSpec &apical_spec,
                              const QuantizationSpec &recurrent_spec);

// Inverse map, for measuring what quantization lost.
RealWeightSet dequantize_weight_set(const WeightSet &weights,
                                    const QuantizationSpec &soma_spec,
                                    const QuantizationSpec &apical_spec,
                                    const QuantizationSpec &recurrent_spec);

class EmptyRaster : public ConfigError {
public:
  EmptyRaster() : ConfigError("empty raster") {}
};

struct ActivityReport {
  std::vector<std::uint64_t> channel_counts; // spikes per neuron
  std::vector<std::uint64_t> cycle_spikes;   // spikes per cycle
  std::vector<double> cycle_fraction;        // fraction of neurons firing
  std::uint64_t total_spikes = 0;
  double sparsity = 0.0; // total / (neurons * cycles)

  // Header "cycle,spikes,fraction".
  void write_cycles_csv(std::ostream &os) const;
  // Header "channel,spikes".
  void write_channels_csv(std::ostream &os) const;
};

// Throws EmptyRaster when the raster has no cycles or no neurons.
ActivityReport activity_stats(const SpikeRaster &raster);

struct WeightHistogram {
  std::vector<double> edges; // bins + 1, strictly increasing
  std::vector<std::uint64_t> counts;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;

  // Header "bin,lo,hi,count".
  void write_csv(std::ostream &os) const;
};

// Equal-width bins over [lo, hi]; the last bin is closed. Values outside the
// range are not counted.
WeightHistogram weight_histogram(std::span<const double> weights,
                                 std::size_t bins, double lo, double hi);
// Range taken from the data; a degenerate range is widened by 0.5 each side.
WeightHistogram weight_histogram(std::span<const double> weights,
                                 std::size_t bins);

} // namespace qclif
