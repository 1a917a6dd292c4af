#include "qclif/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

namespace qclif {

void QuantizationSpec::validate() const {
  if (bits < 2 || bits > 16)
    throw ConfigError("quantization bits " + std::to_string(bits) +
                      " outside [2, 16]");
  if (!std::isfinite(range_lo) || !std::isfinite(range_hi) ||
      !(range_lo < range_hi))
    throw ConfigError("quantization range must satisfy lo < hi");
  if (range_lo > 0.0 || range_hi < 0.0)
    throw ConfigError("quantization range must contain zero");
}

double QuantizationSpec::max_abs() const noexcept {
  return std::max(std::abs(range_lo), std::abs(range_hi));
}

std::int64_t quantize_value(double x, const QuantizationSpec &spec) {
  spec.validate();
  if (!std::isfinite(x))
    throw NonFiniteInput("quantize_value");
  const double clamped = std::clamp(x, spec.range_lo, spec.range_hi);
  // Multiply before dividing so grid points such as 0.25 * 127 / 0.5 = 63.5
  // stay exact and the tie rule applies.
  const double grid =
      clamped * static_cast<double>(spec.qmax()) / spec.max_abs();
  // nearbyint honours the default round-to-nearest-even mode.
  return static_cast<std::int64_t>(std::nearbyint(grid));
}

double dequantize_value(std::int64_t q, const QuantizationSpec &spec) {
  return static_cast<double>(q) * spec.max_abs() /
         static_cast<double>(spec.qmax());
}

namespace {

Matrix<std::int32_t> quantize_matrix(const Matrix<double> &m,
                                     const QuantizationSpec &spec) {
  spec.validate();
  Matrix<std::int32_t> out(m.rows(), m.cols());
  const auto src = m.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i)
    dst[i] = static_cast<std::int32_t>(quantize_value(src[i], spec));
  return out;
}

Matrix<double> dequantize_matrix(const Matrix<std::int32_t> &m,
                                 const QuantizationSpec &spec) {
  Matrix<double> out(m.rows(), m.cols());
  const auto src = m.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i)
    dst[i] = dequantize_value(src[i], spec);
  return out;
}

} // namespace

WeightSet quantize_weight_set(const RealWeightSet &weights,
                              const QuantizationSpec &soma_spec,
                              const QuantizationSpec &apical_spec,
                              const QuantizationSpec &recurrent_spec) {
  return {quantize_matrix(weights.context, apical_spec),
          quantize_matrix(weights.soma, soma_spec),
          quantize_matrix(weights.recurrent, recurrent_spec)};
}

RealWeightSet dequantize_weight_set(const WeightSet &weights,
                                    const QuantizationSpec &soma_spec,
                                    const QuantizationSpec &apical_spec,
                                    const QuantizationSpec &recurrent_spec) {
  return {dequantize_matrix(weights.context, apical_spec),
          dequantize_matrix(weights.soma, soma_spec),
          dequantize_matrix(weights.recurrent, recurrent_spec)};
}

ActivityReport activity_stats(const SpikeRaster &raster) {
  if (raster.cycles == 0 || raster.neuron_count == 0)
    throw EmptyRaster();
  ActivityReport r;
  r.channel_counts.assign(raster.neuron_count, 0);
  r.cycle_fraction.reserve(raster.cycles);
  r.cycle_spikes.reserve(raster.cycles);
  for (std::uint64_t t = 0; t < raster.cycles; ++t) {
    std::uint64_t fired = 0;
    for (std::size_t j = 0; j < raster.neuron_count; ++j)
      if (raster.at(t, j)) {
        ++fired;
        ++r.channel_counts[j];
      }
    r.total_spikes += fired;
    r.cycle_spikes.push_back(fired);
    r.cycle_fraction.push_back(static_cast<double>(fired) /
                               static_cast<double>(raster.neuron_count));
  }
  r.sparsity = static_cast<double>(r.total_spikes) /
               (static_cast<double>(raster.neuron_count) *
                static_cast<double>(raster.cycles));
  return r;
}

void ActivityReport::write_cycles_csv(std::ostream &os) const {
  os << "cycle,spikes,fraction\n";
  for (std::size_t t = 0; t < cycle_fraction.size(); ++t)
    os << t << ',' << cycle_spikes[t] << ',' << cycle_fraction[t] << '\n';
}

void ActivityReport::write_channels_csv(std::ostream &os) const {
  os << "channel,spikes\n";
  for (std::size_t j = 0; j < channel_counts.size(); ++j)
    os << j << ',' << channel_counts[j] << '\n';
}

WeightHistogram weight_histogram(std::span<const double> weights,
                                 std::size_t bins, double lo, double hi) {
  if (bins < 1)
    throw ConfigError("histogram needs at least one bin");
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
    throw ConfigError("histogram range must satisfy lo < hi");
  WeightHistogram h;
  h.edges.resize(bins + 1);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t i = 0; i <= bins; ++i)
    h.edges[i] = lo + width * static_cast<double>(i);
  h.edges.back() = hi;
  h.counts.assign(bins, 0);

  double sum = 0.0;
  h.min = std::numeric_limits<double>::infinity();
  h.max = -std::numeric_limits<double>::infinity();
  for (double w : weights) {
    if (!std::isfinite(w))
      throw NonFiniteInput("histogram weight");
    sum += w;
    h.min = std::min(h.min, w);
    h.max = std::max(h.max, w);
    if (w < lo || w > hi)
      continue;
    auto idx = static_cast<std::size_t>(std::floor((w - lo) / width));
    idx = std::min(idx, bins - 1);
    // Settle on the bin whose stored edges actually bracket w.
    while (idx > 0 && w < h.edges[idx])
      --idx;
    while (idx + 1 < bins && w >= h.edges[idx + 1])
      ++idx;
    ++h.counts[idx];
  }
  if (weights.empty()) {
    h.min = h.max = 0.0;
  } else {
    h.mean = sum / static_cast<double>(weights.size());
  }
  return h;
}

WeightHistogram weight_histogram(std::span<const double> weights,
                                 std::size_t bins) {
  double lo = 0.0, hi = 0.0;
  if (!weights.empty()) {
    const auto [mn, mx] = std::minmax_element(weights.begin(), weights.end());
    lo = *mn;
    hi = *mx;
  }
  if (!(lo < hi)) {
    lo -= 0.5;
    hi += 0.5;
  }
  return weight_histogram(weights, bins, lo, hi);
}

void WeightHistogram::write_csv(std::ostream &os) const {
  os << "bin,lo,hi,count\n";
  for (std::size_t i = 0; i < counts.size(); ++i)
    os << i << ',' << edges[i] << ',' << edges[i + 1] << ',' << counts[i]
       << '\n';
}

} // namespace qclif
