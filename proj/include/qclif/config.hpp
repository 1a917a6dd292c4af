#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qclif/fixedpoint.hpp"
#include "qclif/layer.hpp"
#include "qclif/neuron.hpp"
#include "qclif/task.hpp"

namespace qclif {

enum class Mode { functional, datapath };

const char *mode_name(Mode m) noexcept;
Mode parse_mode(const std::string &s);

// Run configuration. On disk it is a "key = value" text file; '#' starts a
// comment. The first setting must be "version = 1". Leak and threshold keys
// accept one value for every neuron or a comma-separated per-neuron list.
struct RunConfig {
  std::uint32_t neuron_count = 10;
  std::uint32_t stimulus_channels = 230;
  std::uint32_t context_channels = 10;
  int weight_width = 8;
  int apical_width = 16;
  int somatic_width = 32;
  std::vector<std::int64_t> alpha_leak{7};
  std::vector<std::int64_t> beta_leak{200};
  std::vector<std::int64_t> threshold{64};
  OverflowPolicy overflow = OverflowPolicy::error;
  std::uint64_t seed = 1;
  std::uint64_t cycles = 1000;
  std::uint64_t trial_length = 0;
  Mode mode = Mode::functional;

  // Generated inputs, used when no stream files are given.
  double dt_ms = 1.0;
  double stimulus_rate_hz = 20.0;
  double context_rate_hz = 200.0;
  std::uint32_t context_target = 0;

  // Weights: loaded from `weights_file` when set, otherwise Gaussian draws
  // quantized at weight_width over the default ranges.
  std::string weights_file;
  double soma_sigma = 0.15;
  double apical_sigma = 0.6;
  double recurrent_sigma = 0.05;

  // Energy constant; empty profile and unset value fall back to the
  // 10-neuron 100 MHz figure.
  std::string energy_profile;
  std::optional<Rational> energy_per_spike_pj;

  // Synthetic task used by the sweep.
  SynthTaskOptions task;

  void validate() const;
  std::vector<NeuronParams> neuron_params() const;
  std::uint64_t synapse_count() const noexcept {
    return static_cast<std::uint64_t>(neuron_count) *
           (stimulus_channels + context_channels + neuron_count);
  }
};

RunConfig parse_run_config(std::istream &is);
RunConfig load_run_config(const std::filesystem::path &path);
void write_run_config(std::ostream &os, const RunConfig &c);

// Gaussian weights drawn with the config seed and quantized at weight_width.
WeightSet make_random_weights(const RunConfig &c);

// Weight file:
//   qclif-weights 1
//   context <rows> <cols>
//   <rows lines of cols integers>
//   soma <rows> <cols>
//   ...
//   recurrent <rows> <cols>
//   ...
void write_weights(std::ostream &os, const WeightSet &w);
WeightSet read_weights(std::istream &is);
WeightSet load_weights(const std::filesystem::path &path);
void save_weights(const std::filesystem::path &path, const WeightSet &w);

} // namespace qclif
