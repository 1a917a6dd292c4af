#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qclif/config.hpp"
#include "qclif/datapath.hpp"
#include "qclif/fixedpoint.hpp"
#include "qclif/quantize.hpp"
#include "qclif/task.hpp"

namespace qclif {

// ---- energy accounting ----

// Energy per spike reported by post-layout synthesis of the design at 45 nm
// (1.1 V). Reporting multipliers only; nothing here models power.
struct EnergyProfile {
  const char *name;
  int neurons;
  int clock_mhz;
  const char *synapses; // "-" for the bare neuron
  Rational pj_per_spike;
};

const std::vector<EnergyProfile> &energy_profiles();

struct EnergyModel {
  Rational pj_per_spike{1342, 1000};
  std::string source = "10n_100mhz_8b";

  static EnergyModel for_config(const RunConfig &c);
  // Exact: spikes x constant.
  Rational estimate_pj(std::uint64_t spikes) const {
    return static_cast<std::int64_t>(spikes) * pj_per_spike;
  }
};

inline constexpr const char *kEnergyLabel =
    "estimate from published worst-case energy-per-spike constants";

// ---- simulate / compare ----

struct SimulationSetup {
  RunConfig config;
  WeightSet weights;
  std::vector<NeuronParams> params;
  EventStream stimulus;
  EventStream context;

  RunInputs inputs() const {
    return {&context, &stimulus, config.cycles, config.trial_length};
  }
};

// Loads weights and streams named by the config or the arguments; missing
// streams are generated from the config seed.
SimulationSetup prepare_simulation(
    const RunConfig &config,
    const std::optional<std::filesystem::path> &stimulus_path = {},
    const std::optional<std::filesystem::path> &context_path = {});

struct Throughput {
  double wall_seconds = 0.0;
  double layer_steps_per_s = 0.0;
  double synaptic_ops_per_s = 0.0;
};

struct RunReport {
  Mode mode = Mode::functional;
  std::uint64_t seed = 0;
  std::uint64_t cycles = 0;
  std::size_t neurons = 0;
  std::uint64_t synapses = 0;
  ActivityReport activity;
  EnergyModel energy;
  Rational energy_pj;
  Throughput throughput;
  std::string config_echo;

  // Timing fields are the only nondeterministic part; leave them out for
  // reproducible output.
  void write_json(std::ostream &os, bool include_timing = true) const;
  void write_summary(std::ostream &os) const;
};

struct SimulateResult {
  SpikeRaster raster;
  RunReport report;
  std::optional<PipelineTrace> trace;
};

// Runs the configured mode and fills the report.
SimulateResult simulate(const SimulationSetup &setup);

struct SimulateOptions {
  std::filesystem::path config;
  std::optional<std::filesystem::path> stimulus;
  std::optional<std::filesystem::path> context;
  std::filesystem::path out;
  std::optional<std::uint64_t> seed;
  std::optional<Mode> mode;
  std::optional<int> bits;
  bool write_trace = false;
};

RunConfig resolve_config(const std::filesystem::path &path,
                         std::optional<std::uint64_t> seed,
                         std::optional<Mode> mode, std::optional<int> bits);

// Writes raster.csv, report.json, activity.csv, weights.txt and, for the
// datapath with write_trace, trace.csv into options.out.
RunReport cmd_simulate(const SimulateOptions &options);

struct CompareResult {
  std::uint64_t mismatches = 0;
  std::optional<std::pair<std::uint64_t, std::size_t>> first; // (cycle, neuron)
  SpikeRaster functional;
  SpikeRaster datapath;
};

CompareResult compare_modes(const SimulationSetup &setup);

// ---- sweep ----

struct SweepRow {
  int bits = 0; // 0 for full precision
  std::size_t trials = 0;
  double neuron_accuracy = 0.0;        // parameters quantized, weights real
  double weight_neuron_accuracy = 0.0; // weights and parameters quantized
  int apical_width = 0;
  int somatic_width = 0;
  bool degraded = false;
};

// Register widths for a b-bit run of the task, sized from the worst case a
// trial can accumulate.
struct TaskWidths {
  int apical = 0;
  int somatic = 0;
  OverflowPolicy overflow = OverflowPolicy::error;
};
TaskWidths size_task_widths(const SynthTaskOptions &o, int bits);

// Integer model of the task at `bits`: weights on the default grids and leaks
// and threshold rounded onto the matching potential grids.
std::vector<NeuronParams> quantize_task_params(const SynthTask &task, int bits);
std::vector<RealNeuronParams> round_task_params(const SynthTask &task,
                                                int bits);

// widths: 0 means full precision.
std::vector<SweepRow> run_sweep(const SynthTask &task,
                                const std::vector<int> &widths);
void write_sweep_csv(std::ostream &os, const std::vector<SweepRow> &rows);

std::vector<SweepRow> cmd_sweep(const std::filesystem::path &config,
                                const std::vector<int> &widths,
                                std::optional<std::uint32_t> trials,
                                std::optional<std::uint64_t> seed,
                                const std::filesystem::path &out);

// ---- bench ----

struct BenchResult {
  std::uint64_t cycles = 0;
  std::uint64_t warmup = 0;
  std::size_t neurons = 0;
  std::uint64_t synapses = 0;
  Throughput parallel;
  Throughput serial;
  int threads = 1;
};

// Times layer_step over `cycles` cycles after `warmup` untimed cycles.
BenchResult bench_layer(const SimulationSetup &setup, std::uint64_t cycles,
                        std::uint64_t warmup);
BenchResult cmd_bench(const std::filesystem::path &config,
                      std::uint64_t cycles,
                      const std::optional<std::filesystem::path> &out);

// ---- stats ----

struct StatsResult {
  ActivityReport activity;
  WeightHistogram spike_count_histogram;
  std::vector<std::pair<std::string, WeightHistogram>> weight_histograms;
};

// Reads a raster event file; with a weight file also bins each matrix.
StatsResult cmd_stats(const std::filesystem::path &raster,
                      const std::optional<std::filesystem::path> &weights,
                      const std::filesystem::path &out, std::size_t bins);

} // namespace qclif
