#include "qclif/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <json.hpp>

#include "qclif/layer.hpp"

namespace qclif {

// ---- energy ----

const std::vector<EnergyProfile> &energy_profiles() {
  static const std::vector<EnergyProfile> profiles{
      {"1n_100mhz", 1, 100, "-", Rational(773, 1000)},
      {"10n_20mhz_8b", 10, 20, "250, 8bit", Rational(2377, 1000)},
      {"10n_50mhz_8b", 10, 50, "250, 8bit", Rational(1581, 1000)},
      {"10n_100mhz_8b", 10, 100, "250, 8bit", Rational(1342, 1000)},
      {"10n_200mhz_8b", 10, 200, "250, 8bit", Rational(1190, 1000)},
      {"200n_100mhz_4b", 200, 100, "82K, 4bit", Rational(87, 10)},
      {"200n_50mhz_8b", 200, 50, "82K, 8bit", Rational(214, 10)},
      {"200n_100mhz_8b", 200, 100, "82K, 8bit", Rational(179, 10)},
  };
  return profiles;
}

EnergyModel EnergyModel::for_config(const RunConfig &c) {
  EnergyModel m;
  if (c.energy_per_spike_pj) {
    if (c.energy_per_spike_pj->num() < 0)
      throw ConfigError("energy_per_spike_pj must be >= 0");
    m.pj_per_spike = *c.energy_per_spike_pj;
    m.source = "config";
    return m;
  }
  if (c.energy_profile.empty())
    return m;
  for (const auto &p : energy_profiles())
    if (c.energy_profile == p.name) {
      m.pj_per_spike = p.pj_per_spike;
      m.source = p.name;
      return m;
    }
  throw ConfigError("unknown energy_profile '" + c.energy_profile + "'");
}

// ---- simulate ----

RunConfig resolve_config(const std::filesystem::path &path,
                         std::optional<std::uint64_t> seed,
                         std::optional<Mode> mode, std::optional<int> bits) {
  auto c = load_run_config(path);
  if (seed) {
    c.seed = *seed;
    c.task.seed = *seed;
  }
  if (mode)
    c.mode = *mode;
  if (bits)
    c.weight_width = *bits;
  c.validate();
  return c;
}

SimulationSetup prepare_simulation(
    const RunConfig &config,
    const std::optional<std::filesystem::path> &stimulus_path,
    const std::optional<std::filesystem::path> &context_path) {
  config.validate();
  SimulationSetup s;
  s.config = config;
  s.weights = config.weights_file.empty() ? make_random_weights(config)
                                          : load_weights(config.weights_file);
  s.params = config.neuron_params();
  if (s.weights.neuron_count() != config.neuron_count ||
      s.weights.stimulus_inputs() != config.stimulus_channels ||
      s.weights.context_inputs() != config.context_channels)
    throw ConfigError("weight shapes do not match the configured layer");

  if (stimulus_path) {
    s.stimulus = read_event_file(*stimulus_path);
  } else {
    s.stimulus = poisson_stream(config.stimulus_rate_hz, config.dt_ms,
                                config.stimulus_channels, config.cycles,
                                config.seed);
  }
  if (context_path) {
    s.context = read_event_file(*context_path);
  } else {
    std::vector<double> p(config.context_channels, 0.0);
    p[config.context_target] = config.context_rate_hz * config.dt_ms / 1000.0;
    s.context = bernoulli_stream(p, config.cycles, config.seed + 1);
  }
  // Streams shorter than the run are silent for the remaining cycles.
  s.stimulus.duration = std::max(s.stimulus.duration, config.cycles);
  s.context.duration = std::max(s.context.duration, config.cycles);
  return s;
}

SimulateResult simulate(const SimulationSetup &setup) {
  const auto &c = setup.config;
  SimulateResult r;
  const auto start = std::chrono::steady_clock::now();
  if (c.mode == Mode::datapath) {
    const auto dp = DatapathConfig::for_layer(setup.weights, setup.params);
    auto run = run_datapath(dp, setup.weights, setup.params, setup.inputs(),
                            /*record_trace=*/true);
    r.raster = std::move(run.raster);
    r.trace = std::move(run.trace);
  } else {
    r.raster = run_functional(setup.weights, setup.params, setup.inputs());
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();

  auto &rep = r.report;
  rep.mode = c.mode;
  rep.seed = c.seed;
  rep.cycles = c.cycles;
  rep.neurons = setup.weights.neuron_count();
  rep.synapses = setup.weights.synapse_count();
  rep.activity = activity_stats(r.raster);
  rep.energy = EnergyModel::for_config(c);
  rep.energy_pj = rep.energy.estimate_pj(rep.activity.total_spikes);
  rep.throughput.wall_seconds = wall;
  if (wall > 0.0) {
    rep.throughput.layer_steps_per_s = static_cast<double>(c.cycles) / wall;
    rep.throughput.synaptic_ops_per_s =
        static_cast<double>(c.cycles) * static_cast<double>(rep.synapses) /
        wall;
  }
  std::ostringstream echo;
  write_run_config(echo, c);
  rep.config_echo = echo.str();
  return r;
}

void RunReport::write_json(std::ostream &os, bool include_timing) const {
  nlohmann::ordered_json j;
  j["mode"] = mode_name(mode);
  j["seed"] = seed;
  j["cycles"] = cycles;
  j["neurons"] = neurons;
  j["synapses"] = synapses;
  j["total_spikes"] = activity.total_spikes;
  j["sparsity"] = activity.sparsity;
  j["energy"] = {{"energy_pj", energy_pj.to_decimal()},
                 {"energy_per_spike_pj", energy.pj_per_spike.to_decimal()},
                 {"source", energy.source},
                 {"label", kEnergyLabel}};
  if (include_timing)
    j["throughput"] = {{"wall_seconds", throughput.wall_seconds},
                       {"layer_steps_per_s", throughput.layer_steps_per_s},
                       {"synaptic_ops_per_s", throughput.synaptic_ops_per_s}};
  j["config"] = config_echo;
  os << j.dump(2) << '\n';
}

void RunReport::write_summary(std::ostream &os) const {
  os << "mode " << mode_name(mode) << ", " << neurons << " neurons, "
     << synapses << " synapses, " << cycles << " cycles, seed " << seed
     << '\n'
     << "spikes " << activity.total_spikes << ", sparsity "
     << activity.sparsity << '\n'
     << "energy " << energy_pj.to_decimal() << " pJ at "
     << energy.pj_per_spike.to_decimal() << " pJ/spike (" << energy.source
     << "; " << kEnergyLabel << ")\n"
     << "throughput " << throughput.layer_steps_per_s << " layer-steps/s, "
     << throughput.synaptic_ops_per_s << " synaptic-ops/s\n";
}

namespace {

std::ofstream open_out(const std::filesystem::path &p) {
  std::ofstream os(p, std::ios::binary);
  if (!os)
    throw IoError("cannot write '" + p.string() + "'");
  return os;
}

void ensure_dir(const std::filesystem::path &dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw IoError("cannot create '" + dir.string() + "': " + ec.message());
}

} // namespace

RunReport cmd_simulate(const SimulateOptions &options) {
  const auto config =
      resolve_config(options.config, options.seed, options.mode, options.bits);
  const auto setup =
      prepare_simulation(config, options.stimulus, options.context);
  const auto result = simulate(setup);
  ensure_dir(options.out);
  write_event_file(options.out / "raster.csv",
                   raster_to_events(result.raster));
  {
    auto os = open_out(options.out / "report.json");
    result.report.write_json(os);
  }
  {
    auto os = open_out(options.out / "activity.csv");
    result.report.activity.write_cycles_csv(os);
  }
  save_weights(options.out / "weights.txt", setup.weights);
  if (options.write_trace && result.trace) {
    auto os = open_out(options.out / "trace.csv");
    result.trace->write_csv(os);
  }
  return result.report;
}

CompareResult compare_modes(const SimulationSetup &setup) {
  CompareResult r;
  r.functional = run_functional(setup.weights, setup.params, setup.inputs());
  const auto dp = DatapathConfig::for_layer(setup.weights, setup.params);
  r.datapath = run_datapath(dp, setup.weights, setup.params, setup.inputs(),
                            /*record_trace=*/false)
                   .raster;
  const auto n = r.functional.neuron_count;
  for (std::size_t i = 0; i < r.functional.bits.size(); ++i)
    if (r.functional.bits[i] != r.datapath.bits[i]) {
      if (!r.first)
        r.first = {i / n, i % n};
      ++r.mismatches;
    }
  return r;
}

// ---- sweep ----

namespace {

struct Grid {
  double apical_unit;  // real value of one apical raw step
  double somatic_unit; // real value of one somatic-input raw step
};

Grid task_grid(int bits) {
  return {QuantizationSpec::apical(bits).scale(),
          QuantizationSpec::soma(bits).scale()};
}

std::int64_t round_even(double x) {
  return static_cast<std::int64_t>(std::nearbyint(x));
}

} // namespace

TaskWidths size_task_widths(const SynthTaskOptions &o, int bits) {
  const std::int64_t qmax = (std::int64_t{1} << (bits - 1)) - 1;
  const auto T = static_cast<std::int64_t>(o.trial_length);
  const std::int64_t neurons =
      static_cast<std::int64_t>(o.classes) * o.neurons_per_class;
  const std::int64_t stim_fan_in =
      static_cast<std::int64_t>(o.classes) * o.channels_per_class + neurons;
  // Apical register: a whole trial of maximal context input with no leak.
  const auto apical =
      required_accumulator_width(T * o.classes, qmax, /*signed=*/true);
  const auto drive =
      required_accumulator_width(stim_fan_in, qmax, /*signed=*/true);
  TaskWidths w;
  w.apical = std::max({apical.required_width, drive.required_width, 2});
  if (w.apical > 32) {
    w.apical = 32;
    w.overflow = OverflowPolicy::saturate;
  }
  // Somatic register: a whole trial of maximal products.
  const __int128 per_cycle =
      static_cast<__int128>(apical.max_abs_sum) * drive.max_abs_sum;
  const __int128 total = per_cycle * T;
  int somatic = 2 * w.apical;
  if (total <= INT64_MAX / 2) {
    const auto s = required_accumulator_width(
        1, static_cast<std::int64_t>(total), /*signed=*/true);
    somatic = std::max(somatic, s.required_width);
  } else {
    somatic = 64;
  }
  if (somatic > 64) {
    somatic = 64;
    w.overflow = OverflowPolicy::saturate;
  }
  w.somatic = somatic;
  return w;
}

std::vector<NeuronParams> quantize_task_params(const SynthTask &task,
                                               int bits) {
  const auto g = task_grid(bits);
  const auto widths = size_task_widths(task.options, bits);
  std::vector<NeuronParams> out;
  out.reserve(task.params.size());
  for (const auto &rp : task.params) {
    NeuronParams p;
    p.alpha_leak = round_even(rp.alpha_leak / g.apical_unit);
    p.beta_leak = round_even(rp.beta_leak / (g.apical_unit * g.somatic_unit));
    p.v_threshold =
        round_even(rp.v_threshold / (g.apical_unit * g.somatic_unit));
    p.apical_width = widths.apical;
    p.somatic_width = widths.somatic;
    p.weight_width = bits;
    p.overflow = widths.overflow;
    out.push_back(p);
  }
  return out;
}

std::vector<RealNeuronParams> round_task_params(const SynthTask &task,
                                                int bits) {
  const auto g = task_grid(bits);
  const double som = g.apical_unit * g.somatic_unit;
  std::vector<RealNeuronParams> out;
  for (const auto &rp : task.params)
    out.push_back(
        {static_cast<double>(round_even(rp.alpha_leak / g.apical_unit)) *
             g.apical_unit,
         static_cast<double>(round_even(rp.beta_leak / som)) * som,
         static_cast<double>(round_even(rp.v_threshold / som)) * som});
  return out;
}

std::vector<SweepRow> run_sweep(const SynthTask &task,
                                const std::vector<int> &widths) {
  const auto in = task.inputs();
  const double full = task_accuracy(task, run_real(task.weights, task.params, in));
  std::vector<SweepRow> rows;
  for (int bits : widths) {
    SweepRow row;
    row.bits = bits;
    row.trials = task.trials();
    if (bits == 0) {
      row.neuron_accuracy = row.weight_neuron_accuracy = full;
    } else {
      if (bits < 2 || bits > 16)
        throw ConfigError("sweep width " + std::to_string(bits) +
                          " outside [2, 16]");
      const auto rparams = round_task_params(task, bits);
      row.neuron_accuracy =
          task_accuracy(task, run_real(task.weights, rparams, in));
      const auto weights = quantize_weight_set(
          task.weights, QuantizationSpec::soma(bits),
          QuantizationSpec::apical(bits), QuantizationSpec::recurrent(bits));
      const auto params = quantize_task_params(task, bits);
      row.apical_width = params.front().apical_width;
      row.somatic_width = params.front().somatic_width;
      row.weight_neuron_accuracy =
          task_accuracy(task, run_functional(weights, params, in));
    }
    row.degraded = std::min(row.neuron_accuracy, row.weight_neuron_accuracy) <
                   full;
    rows.push_back(row);
  }
  return rows;
}

void write_sweep_csv(std::ostream &os, const std::vector<SweepRow> &rows) {
  os << "precision,trials,neuron_accuracy,weight_neuron_accuracy,"
        "apical_width,somatic_width,degraded\n";
  for (const auto &r : rows) {
    if (r.bits == 0)
      os << "full";
    else
      os << r.bits;
    os << ',' << r.trials << ',' << r.neuron_accuracy << ','
       << r.weight_neuron_accuracy << ',' << r.apical_width << ','
       << r.somatic_width << ',' << (r.degraded ? 1 : 0) << '\n';
  }
}

std::vector<SweepRow> cmd_sweep(const std::filesystem::path &config,
                                const std::vector<int> &widths,
                                std::optional<std::uint32_t> trials,
                                std::optional<std::uint64_t> seed,
                                const std::filesystem::path &out) {
  auto c = resolve_config(config, seed, std::nullopt, std::nullopt);
  if (trials)
    c.task.repeats = *trials;
  const auto task = synth_context_task(c.task);
  const auto rows = run_sweep(task, widths);
  ensure_dir(out);
  auto os = open_out(out / "sweep.csv");
  write_sweep_csv(os, rows);
  return rows;
}

// ---- bench ----

BenchResult bench_layer(const SimulationSetup &setup, std::uint64_t cycles,
                        std::uint64_t warmup) {
  check_run_inputs(setup.weights, setup.params, setup.inputs());
  BenchResult b;
  b.cycles = cycles;
  b.warmup = warmup;
  b.neurons = setup.weights.neuron_count();
  b.synapses = setup.weights.synapse_count();
#ifdef _OPENMP
  b.threads = omp_get_max_threads();
#endif
  // Inputs are materialized up front so only the kernel is timed.
  const auto total = warmup + cycles;
  std::vector<SpikeVector> ctx, stim;
  ctx.reserve(total);
  stim.reserve(total);
  {
    StreamCursor cc(setup.context), sc(setup.stimulus);
    for (std::uint64_t t = 0; t < total; ++t) {
      ctx.push_back(cc.at(t));
      stim.push_back(sc.at(t));
    }
  }
  const auto time_kernel = [&](Kernel kernel) {
    auto state = LayerState::zeros(b.neurons);
    const auto step = [&](std::uint64_t t) {
      auto r = kernel == Kernel::parallel
                   ? layer_step(state, setup.weights, setup.params, ctx[t],
                                stim[t])
                   : layer_step_serial(state, setup.weights, setup.params,
                                       ctx[t], stim[t]);
      state = std::move(r.state);
    };
    for (std::uint64_t t = 0; t < warmup; ++t)
      step(t);
    const auto start = std::chrono::steady_clock::now();
    for (std::uint64_t t = warmup; t < total; ++t)
      step(t);
    Throughput tp;
    tp.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (tp.wall_seconds > 0.0) {
      tp.layer_steps_per_s = static_cast<double>(cycles) / tp.wall_seconds;
      tp.synaptic_ops_per_s = tp.layer_steps_per_s *
                              static_cast<double>(b.synapses);
    }
    return tp;
  };
  b.parallel = time_kernel(Kernel::parallel);
  b.serial = time_kernel(Kernel::serial);
  return b;
}

BenchResult cmd_bench(const std::filesystem::path &config,
                      std::uint64_t cycles,
                      const std::optional<std::filesystem::path> &out) {
  auto c = resolve_config(config, std::nullopt, std::nullopt, std::nullopt);
  const std::uint64_t warmup = std::max<std::uint64_t>(cycles / 10, 1);
  c.cycles = cycles + warmup;
  const auto setup = prepare_simulation(c);
  auto b = bench_layer(setup, cycles, warmup);
  if (out) {
    ensure_dir(*out);
    auto os = open_out(*out / "bench.csv");
    os << "kernel,threads,neurons,synapses,cycles,wall_seconds,"
          "layer_steps_per_s,synaptic_ops_per_s\n";
    for (const auto &[name, tp] :
         {std::pair{"parallel", b.parallel}, std::pair{"serial", b.serial}})
      os << name << ',' << (std::string(name) == "serial" ? 1 : b.threads)
         << ',' << b.neurons << ',' << b.synapses << ',' << b.cycles << ','
         << tp.wall_seconds << ',' << tp.layer_steps_per_s << ','
         << tp.synaptic_ops_per_s << '\n';
  }
  return b;
}

// ---- stats ----

StatsResult cmd_stats(const std::filesystem::path &raster,
                      const std::optional<std::filesystem::path> &weights,
                      const std::filesystem::path &out, std::size_t bins) {
  StatsResult s;
  const auto r = events_to_raster(read_event_file(raster));
  s.activity = activity_stats(r);
  std::vector<double> counts(s.activity.channel_counts.begin(),
                             s.activity.channel_counts.end());
  s.spike_count_histogram = weight_histogram(counts, bins);
  if (weights) {
    const auto w = load_weights(*weights);
    for (const auto &[name, m] :
         {std::pair<std::string, const Matrix<std::int32_t> *>{"context",
                                                                &w.context},
          {"soma", &w.soma},
          {"recurrent", &w.recurrent}}) {
      std::vector<double> vals(m->data().begin(), m->data().end());
      s.weight_histograms.emplace_back(name, weight_histogram(vals, bins));
    }
  }
  ensure_dir(out);
  {
    auto os = open_out(out / "activity_cycles.csv");
    s.activity.write_cycles_csv(os);
  }
  {
    auto os = open_out(out / "activity_channels.csv");
    s.activity.write_channels_csv(os);
  }
  {
    auto os = open_out(out / "spike_count_histogram.csv");
    s.spike_count_histogram.write_csv(os);
  }
  for (const auto &[name, h] : s.weight_histograms) {
    auto os = open_out(out / ("weight_histogram_" + name + ".csv"));
    h.write_csv(os);
  }
  return s;
}

} // namespace qclif
