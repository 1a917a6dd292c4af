#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "qclif/fixedpoint.hpp"

namespace qclif {

// What a register does with a value outside its width. `error` is the
// default: a correctly sized datapath never overflows.
enum class OverflowPolicy { error, saturate };

// Per-neuron constants in raw integer units.
//
// apical_width is the hardware N: the width of both compartment inputs and of
// the apical accumulator. The multiplier produces a 2N-bit product that the
// somatic accumulator (somatic_width bits) adds.
struct NeuronParams {
  std::int64_t alpha_leak = 7;
  std::int64_t beta_leak = 200;
  std::int64_t v_threshold = 64;
  int apical_width = 16;
  int somatic_width = 32;
  int weight_width = 8;
  OverflowPolicy overflow = OverflowPolicy::error;

  // Throws ConfigError when a constant does not fit its register.
  void validate() const;
};

// Bit vector stored one byte per channel so it can be indexed directly.
class SpikeVector {
public:
  SpikeVector() = default;
  explicit SpikeVector(std::size_t n) : bits_(n, 0) {}
  explicit SpikeVector(std::vector<std::uint8_t> bits);

  std::size_t size() const noexcept { return bits_.size(); }
  bool operator[](std::size_t i) const noexcept { return bits_[i] != 0; }
  void set(std::size_t i, bool on = true) noexcept { bits_[i] = on ? 1 : 0; }
  void clear() noexcept { std::fill(bits_.begin(), bits_.end(), 0); }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }
  std::size_t count() const noexcept;

  // Indices of set bits, ascending.
  std::vector<std::uint32_t> active() const;

  friend bool operator==(const SpikeVector &, const SpikeVector &) = default;

private:
  std::vector<std::uint8_t> bits_;
};

// Dense row-major matrix; one row per neuron.
template <typename T> class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  T &operator()(std::size_t r, std::size_t c) noexcept {
    return data_[r * cols_ + c];
  }
  const T &operator()(std::size_t r, std::size_t c) const noexcept {
    return data_[r * cols_ + c];
  }
  std::span<const T> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<T> row(std::size_t r) noexcept {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const T> data() const noexcept { return data_; }
  std::span<T> data() noexcept { return data_; }

  friend bool operator==(const Matrix &, const Matrix &) = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

struct WeightSet {
  Matrix<std::int32_t> context;   // neurons x context inputs
  Matrix<std::int32_t> soma;      // neurons x stimulus inputs
  Matrix<std::int32_t> recurrent; // neurons x neurons

  std::size_t neuron_count() const noexcept { return soma.rows(); }
  std::size_t context_inputs() const noexcept { return context.cols(); }
  std::size_t stimulus_inputs() const noexcept { return soma.cols(); }
  std::size_t synapse_count() const noexcept {
    return context.data().size() + soma.data().size() +
           recurrent.data().size();
  }

  // Shapes agree and every entry fits `weight_width` signed bits.
  void validate(int weight_width) const;

  friend bool operator==(const WeightSet &, const WeightSet &) = default;
};

struct LayerState {
  std::vector<std::int64_t> v_apical;
  std::vector<std::int64_t> v_somatic;
  SpikeVector prev_spikes;
  std::uint64_t cycle = 0;

  static LayerState zeros(std::size_t neurons);
  std::size_t size() const noexcept { return v_somatic.size(); }

  friend bool operator==(const LayerState &, const LayerState &) = default;
};

// The AND-gate synapse.
constexpr std::int32_t gate_weight(bool spike, std::int32_t weight) noexcept {
  return weight & -static_cast<std::int32_t>(spike);
}

// Sum of gated weights. Throws DimensionMismatch on a length mismatch.
std::int64_t synaptic_sum(const SpikeVector &spikes,
                          std::span<const std::int32_t> weights);

// Stimulus drive plus recurrent drive from the previous cycle's spikes.
std::int64_t somatic_input(const SpikeVector &stimulus_spikes,
                           std::span<const std::int32_t> w_soma_row,
                           const SpikeVector &prev_spikes,
                           std::span<const std::int32_t> w_recurrent_row);

// max(0, v - leak + input). The input and the pre-floor value must both fit
// the apical register (apical_width signed bits).
std::int64_t apical_step(std::int64_t v_apical, std::int64_t alpha_leak,
                         std::int64_t v_input_ap, int apical_width = 32,
                         OverflowPolicy policy = OverflowPolicy::error);

struct SomaticResult {
  std::int64_t v_somatic = 0;
  bool spike = false;

  friend bool operator==(const SomaticResult &,
                         const SomaticResult &) = default;
};

// candidate = max(0, v - leak + relu(v_apical_new) * v_input_som); fires and
// resets to zero when candidate >= threshold. v_input_som is a multiplier
// operand and must fit apical_width bits; the candidate must fit
// somatic_width bits.
SomaticResult somatic_step(std::int64_t v_somatic, std::int64_t beta_leak,
                           std::int64_t v_apical_new, std::int64_t v_input_som,
                           std::int64_t v_threshold, int apical_width = 32,
                           int somatic_width = 64,
                           OverflowPolicy policy = OverflowPolicy::error);

} // namespace qclif
