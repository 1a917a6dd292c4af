#include "qclif/neuron.hpp"

#include <string>

namespace qclif {

namespace {

void check_width(int w, int lo, int hi, const char *name) {
  if (w < lo || w > hi)
    throw ConfigError(std::string(name) + " " + std::to_string(w) +
                      " outside [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
}

// Routes an out-of-range register value through the configured policy.
std::int64_t fit_register(std::int64_t v, int width, OverflowPolicy policy,
                          const char *what) {
  if (fits_signed(v, width))
    return v;
  if (policy == OverflowPolicy::saturate)
    return v < 0 ? signed_min(width) : signed_max(width);
  throw OverflowError(std::string(what) + " value " + std::to_string(v) +
                      " exceeds " + std::to_string(width) + "-bit register");
}

} // namespace

void NeuronParams::validate() const {
  check_width(apical_width, kMinWidth, 32, "apical_width");
  check_width(somatic_width, kMinWidth, kMaxWidth, "somatic_width");
  check_width(weight_width, kMinWidth, 32, "weight_width");
  if (alpha_leak < 0 || !fits_signed(alpha_leak, apical_width))
    throw ConfigError("alpha_leak " + std::to_string(alpha_leak) +
                      " not representable in apical register");
  if (beta_leak < 0 || !fits_signed(beta_leak, somatic_width))
    throw ConfigError("beta_leak " + std::to_string(beta_leak) +
                      " not representable in somatic register");
  if (v_threshold < 0 || !fits_signed(v_threshold, somatic_width))
    throw ConfigError("v_threshold " + std::to_string(v_threshold) +
                      " not representable in somatic register");
}

SpikeVector::SpikeVector(std::vector<std::uint8_t> bits)
    : bits_(std::move(bits)) {
  for (auto &b : bits_)
    b = b != 0;
}

std::size_t SpikeVector::count() const noexcept {
  std::size_t n = 0;
  for (auto b : bits_)
    n += b;
  return n;
}

std::vector<std::uint32_t> SpikeVector::active() const {
  std::vector<std::uint32_t> idx;
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i])
      idx.push_back(static_cast<std::uint32_t>(i));
  return idx;
}

void WeightSet::validate(int weight_width) const {
  const auto n = soma.rows();
  if (context.rows() != n || recurrent.rows() != n || recurrent.cols() != n)
    throw DimensionMismatch("weight matrices disagree on neuron count");
  for (const auto *m : {&context, &soma, &recurrent})
    for (auto w : m->data())
      if (!fits_signed(w, weight_width))
        throw ConfigError("weight " + std::to_string(w) + " exceeds " +
                          std::to_string(weight_width) + "-bit range");
}

LayerState LayerState::zeros(std::size_t neurons) {
  LayerState s;
  s.v_apical.assign(neurons, 0);
  s.v_somatic.assign(neurons, 0);
  s.prev_spikes = SpikeVector(neurons);
  return s;
}

std::int64_t synaptic_sum(const SpikeVector &spikes,
                          std::span<const std::int32_t> weights) {
  if (spikes.size() != weights.size())
    throw DimensionMismatch("spike vector length " +
                            std::to_string(spikes.size()) +
                            " vs weight row length " +
                            std::to_string(weights.size()));
  std::int64_t sum = 0;
  const auto bits = spikes.bits();
  for (std::size_t i = 0; i < bits.size(); ++i)
    sum += gate_weight(bits[i] != 0, weights[i]);
  return sum;
}

std::int64_t somatic_input(const SpikeVector &stimulus_spikes,
                           std::span<const std::int32_t> w_soma_row,
                           const SpikeVector &prev_spikes,
                           std::span<const std::int32_t> w_recurrent_row) {
  return synaptic_sum(stimulus_spikes, w_soma_row) +
         synaptic_sum(prev_spikes, w_recurrent_row);
}

std::int64_t apical_step(std::int64_t v_apical, std::int64_t alpha_leak,
                         std::int64_t v_input_ap, int apical_width,
                         OverflowPolicy policy) {
  const auto input = fit_register(v_input_ap, apical_width, policy,
                                  "apical input");
  const auto candidate = fit_register(v_apical - alpha_leak + input,
                                      apical_width, policy, "apical");
  return candidate < 0 ? 0 : candidate;
}

SomaticResult somatic_step(std::int64_t v_somatic, std::int64_t beta_leak,
                           std::int64_t v_apical_new, std::int64_t v_input_som,
                           std::int64_t v_threshold, int apical_width,
                           int somatic_width, OverflowPolicy policy) {
  const auto input = fit_register(v_input_som, apical_width, policy,
                                  "somatic input");
  const std::int64_t relu = v_apical_new > 0 ? v_apical_new : 0;
  // N x N -> 2N bits; apical_width <= 32 keeps this inside int64.
  const std::int64_t drive = relu * input;
  const __int128 wide = static_cast<__int128>(v_somatic) - beta_leak + drive;
  std::int64_t candidate;
  if (wide > signed_max(somatic_width) || wide < signed_min(somatic_width)) {
    if (policy == OverflowPolicy::error)
      throw OverflowError("somatic value exceeds " +
                          std::to_string(somatic_width) + "-bit register");
    candidate = wide < 0 ? signed_min(somatic_width) : signed_max(somatic_width);
  } else {
    candidate = static_cast<std::int64_t>(wide);
  }
  if (candidate < 0)
    candidate = 0;
  if (candidate >= v_threshold)
    return {0, true};
  return {candidate, false};
}

} // namespace qclif
