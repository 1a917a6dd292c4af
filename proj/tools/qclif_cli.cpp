// qclif: simulate, compare, sweep, bench and stats for the quantized
// context-dependent LIF layer.
//
// Exit codes: 0 success, 1 usage, 2 config, 3 io, 4 numeric (overflow or
// functional/datapath divergence). Errors go to stderr as
// "error[<category>]: <message>".

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qclif/harness.hpp"

namespace {

int exit_code(qclif::ErrorCategory c) {
  switch (c) {
  case qclif::ErrorCategory::usage:
    return 1;
  case qclif::ErrorCategory::config:
    return 2;
  case qclif::ErrorCategory::io:
    return 3;
  case qclif::ErrorCategory::numeric:
    return 4;
  }
  return 1;
}

std::vector<int> parse_widths(const std::string &list) {
  std::vector<int> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "full") {
      out.push_back(0);
      continue;
    }
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size())
        throw std::invalid_argument(item);
    } catch (const std::exception &) {
      throw qclif::Error(qclif::ErrorCategory::usage,
                         "bad width '" + item + "' in --bits");
    }
  }
  return out;
}

std::optional<qclif::Mode> mode_opt(const std::string &s) {
  if (s.empty())
    return std::nullopt;
  return qclif::parse_mode(s);
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Quantized context-dependent LIF layer model"};
  app.require_subcommand(1);

  std::string config, out, mode, stimulus, context, raster, weights;
  std::optional<std::uint64_t> seed;
  std::optional<int> bits;
  bool trace = false;

  auto *sim = app.add_subcommand("simulate", "Run the layer and write a raster "
                                             "and report");
  sim->add_option("--config", config, "Run configuration file")->required();
  sim->add_option("--stimulus", stimulus, "Stimulus event file");
  sim->add_option("--context", context, "Context event file");
  sim->add_option("--out", out, "Output directory")->required();
  sim->add_option("--seed", seed, "Override the config seed");
  sim->add_option("--mode", mode, "functional | datapath");
  sim->add_option("--bits", bits, "Override the weight width");
  sim->add_flag("--trace", trace, "Write the datapath trace CSV");

  auto *cmp = app.add_subcommand("compare", "Diff functional and datapath "
                                            "rasters");
  cmp->add_option("--config", config, "Run configuration file")->required();
  cmp->add_option("--stimulus", stimulus, "Stimulus event file");
  cmp->add_option("--context", context, "Context event file");
  cmp->add_option("--seed", seed, "Override the config seed");
  cmp->add_option("--bits", bits, "Override the weight width");

  std::string bit_list = "full,16,8,4,2";
  std::optional<std::uint32_t> trials;
  auto *swp = app.add_subcommand("sweep", "Quantization sweep on the "
                                          "synthetic context task");
  swp->add_option("--config", config, "Run configuration file")->required();
  swp->add_option("--bits", bit_list, "Comma-separated widths, 'full' for "
                                      "full precision");
  swp->add_option("--trials", trials, "Repeats of every class pairing");
  swp->add_option("--seed", seed, "Task seed");
  swp->add_option("--out", out, "Output directory")->required();

  std::uint64_t cycles = 2000;
  auto *bch = app.add_subcommand("bench", "Layer-step throughput");
  bch->add_option("--config", config, "Run configuration file")->required();
  bch->add_option("--cycles", cycles, "Timed cycles");
  bch->add_option("--out", out, "Output directory for bench.csv");

  std::size_t bins = 32;
  auto *sts = app.add_subcommand("stats", "Activity statistics and "
                                          "histograms");
  sts->add_option("--raster", raster, "Raster event file")->required();
  sts->add_option("--weights", weights, "Weight file to histogram");
  sts->add_option("--bins", bins, "Histogram bins");
  sts->add_option("--out", out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  const auto path_opt = [](const std::string &s)
      -> std::optional<std::filesystem::path> {
    if (s.empty())
      return std::nullopt;
    return std::filesystem::path(s);
  };

  try {
    if (*sim) {
      qclif::SimulateOptions o;
      o.config = config;
      o.stimulus = path_opt(stimulus);
      o.context = path_opt(context);
      o.out = out;
      o.seed = seed;
      o.mode = mode_opt(mode);
      o.bits = bits;
      o.write_trace = trace;
      const auto report = qclif::cmd_simulate(o);
      report.write_summary(std::cout);
      std::cout << "wrote " << out << "/raster.csv\n";
    } else if (*cmp) {
      const auto c = qclif::resolve_config(config, seed, std::nullopt, bits);
      const auto setup = qclif::prepare_simulation(c, path_opt(stimulus),
                                                   path_opt(context));
      const auto r = qclif::compare_modes(setup);
      std::cout << "functional spikes " << r.functional.total_spikes()
                << ", datapath spikes " << r.datapath.total_spikes()
                << ", mismatches " << r.mismatches << '\n';
      if (r.mismatches) {
        std::cerr << "error[numeric]: modes diverge first at cycle "
                  << r.first->first << " neuron " << r.first->second << '\n';
        return 4;
      }
    } else if (*swp) {
      const auto rows =
          qclif::cmd_sweep(config, parse_widths(bit_list), trials, seed, out);
      qclif::write_sweep_csv(std::cout, rows);
      for (const auto &r : rows)
        if (r.bits != 0 && r.degraded)
          std::cout << "note: " << r.bits
                    << "-bit run loses accuracy against full precision\n";
    } else if (*bch) {
      const auto b = qclif::cmd_bench(config, cycles, path_opt(out));
      std::cout << b.neurons << " neurons, " << b.synapses << " synapses, "
                << b.cycles << " cycles (" << b.warmup << " warmup)\n"
                << "parallel (" << b.threads
                << " threads): " << b.parallel.layer_steps_per_s
                << " layer-steps/s, " << b.parallel.synaptic_ops_per_s
                << " synaptic-ops/s\n"
                << "serial: " << b.serial.layer_steps_per_s
                << " layer-steps/s, " << b.serial.synaptic_ops_per_s
                << " synaptic-ops/s\n";
    } else if (*sts) {
      const auto s = qclif::cmd_stats(raster, path_opt(weights), out, bins);
      std::cout << "neurons " << s.activity.channel_counts.size() << ", cycles "
                << s.activity.cycle_fraction.size() << ", spikes "
                << s.activity.total_spikes << ", sparsity "
                << s.activity.sparsity << '\n';
    }
  } catch (const qclif::Error &e) {
    std::cerr << "error[" << qclif::category_name(e.category())
              << "]: " << e.what() << '\n';
    return exit_code(e.category());
  } catch (const std::exception &e) {
    std::cerr << "error[io]: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
