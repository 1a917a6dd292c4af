#include "qclif/datapath.hpp"

#include <algorithm>
#include <ostream>
#include <string>

namespace qclif {

void DatapathConfig::validate() const {
  if (apical_width < kMinWidth || apical_width > 32)
    throw ConfigError("apical_width outside [2, 32]");
  if (product_width != 2 * apical_width)
    throw ConfigError("product_width must be 2 x apical_width");
  if (somatic_width < kMinWidth || somatic_width > kMaxWidth)
    throw ConfigError("somatic_width outside [2, 64]");
  if (weight_width < kMinWidth || weight_width > 32)
    throw ConfigError("weight_width outside [2, 32]");
}

DatapathConfig DatapathConfig::for_layer(const WeightSet &weights,
                                         std::span<const NeuronParams> params) {
  if (params.empty())
    throw ConfigError("datapath needs neuron parameters");
  const auto &p0 = params.front();
  for (const auto &p : params)
    if (p.apical_width != p0.apical_width ||
        p.somatic_width != p0.somatic_width ||
        p.weight_width != p0.weight_width || p.overflow != p0.overflow)
      throw ConfigError("datapath requires uniform widths across neurons");
  DatapathConfig c;
  c.fan_in_context = weights.context_inputs();
  c.fan_in_stimulus = weights.stimulus_inputs();
  c.neuron_count = weights.neuron_count();
  c.weight_width = p0.weight_width;
  c.apical_width = p0.apical_width;
  c.product_width = 2 * p0.apical_width;
  c.somatic_width = p0.somatic_width;
  c.overflow = p0.overflow;
  return c;
}

int swm_stage_count(std::size_t terms) noexcept {
  int stages = 0;
  for (std::size_t reach = 1; reach < terms; reach *= 3)
    ++stages;
  return stages;
}

namespace {

// 3:2 compression followed by the stage's carry-propagate add. Operates on
// two's-complement bit patterns, so the value is preserved modulo 2^64.
std::uint64_t add3(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  const std::uint64_t sum = a ^ b ^ c;
  const std::uint64_t carry = ((a & b) | (a & c) | (b & c)) << 1;
  return sum + carry;
}

} // namespace

SwmResult swm_reduce(std::span<const std::int64_t> gated_weights,
                     std::size_t fan_in_limit) {
  if (gated_weights.size() > fan_in_limit)
    throw FanInExceeded(std::to_string(gated_weights.size()) + " terms > " +
                        std::to_string(fan_in_limit));
  std::vector<std::uint64_t> level(gated_weights.size());
  std::transform(gated_weights.begin(), gated_weights.end(), level.begin(),
                 [](std::int64_t v) { return static_cast<std::uint64_t>(v); });
  SwmResult r;
  while (level.size() > 1) {
    std::vector<std::uint64_t> next;
    next.reserve((level.size() + 2) / 3);
    for (std::size_t i = 0; i < level.size(); i += 3) {
      const auto b = i + 1 < level.size() ? level[i + 1] : 0;
      const auto c = i + 2 < level.size() ? level[i + 2] : 0;
      next.push_back(add3(level[i], b, c));
    }
    level = std::move(next);
    ++r.stages_used;
  }
  r.sum = level.empty() ? 0 : static_cast<std::int64_t>(level.front());
  return r;
}

SwmResult swm_reduce(std::span<const std::int64_t> gated_weights,
                     const DatapathConfig &config) {
  return swm_reduce(gated_weights, config.max_fan_in());
}

std::int64_t mu_multiply(std::int64_t apical_out, std::int64_t somatic_drive,
                         int n_bits) {
  if (n_bits < kMinWidth || n_bits > 32)
    throw ConfigError("multiplier width outside [2, 32]");
  if (!fits_signed(apical_out, n_bits) || !fits_signed(somatic_drive, n_bits))
    throw OverflowError("multiplier operand exceeds " +
                        std::to_string(n_bits) + " bits");
  return apical_out * somatic_drive;
}

void PipelineTrace::write_csv(std::ostream &os) const {
  os << "cycle,neuron,block,value\n";
  for (const auto &r : records) {
    const auto row = [&](const char *block, std::int64_t v) {
      os << r.cycle << ',' << r.neuron << ',' << block << ',' << v << '\n';
    };
    row("SWM_CON", r.swm_context);
    row("SWM_SOM", r.swm_somatic);
    row("AA", r.apical);
    row("MU", r.product);
    row("SA", r.somatic);
    row("TC", r.spike ? 1 : 0);
  }
}

namespace {

// A register write under the configured overflow policy.
std::int64_t latch(std::int64_t v, int width, OverflowPolicy policy,
                   const char *block) {
  if (fits_signed(v, width))
    return v;
  if (policy == OverflowPolicy::saturate)
    return saturate(v, width, true).raw();
  throw OverflowError(std::string(block) + " value " + std::to_string(v) +
                      " exceeds " + std::to_string(width) + "-bit register");
}

} // namespace

DatapathRun run_datapath(const DatapathConfig &config,
                         const WeightSet &weights,
                         std::span<const NeuronParams> params,
                         const RunInputs &in, bool record_trace) {
  config.validate();
  check_run_inputs(weights, params, in);
  const auto n = weights.neuron_count();
  if (config.neuron_count != n || config.fan_in_context != weights.context_inputs() ||
      config.fan_in_stimulus != weights.stimulus_inputs())
    throw DimensionMismatch("datapath config does not match weight shapes");
  for (const auto &p : params)
    if (p.apical_width != config.apical_width ||
        p.somatic_width != config.somatic_width ||
        p.overflow != config.overflow)
      throw ConfigError("neuron widths differ from datapath config");

  const auto N = config.apical_width;
  const auto policy = config.overflow;

  DatapathRun run{SpikeRaster::empty(n, in.cycles), {}};
  run.trace.context_stages = swm_stage_count(config.fan_in_context);
  run.trace.somatic_stages =
      swm_stage_count(config.fan_in_stimulus + config.neuron_count);
  run.trace.latency_stages =
      std::max(run.trace.context_stages, run.trace.somatic_stages) + 3;
  if (record_trace)
    run.trace.records.reserve(in.cycles * n);

  // Architectural registers.
  std::vector<std::int64_t> aa(n, 0), sa(n, 0);
  SpikeVector feedback(n), next_feedback(n);

  std::vector<std::int64_t> ctx_terms(config.fan_in_context);
  std::vector<std::int64_t> som_terms(config.fan_in_stimulus + n);

  StreamCursor ctx_cursor(*in.context), stim_cursor(*in.stimulus);
  for (std::uint64_t t = 0; t < in.cycles; ++t) {
    if (in.trial_length && t % in.trial_length == 0) {
      std::fill(aa.begin(), aa.end(), 0);
      std::fill(sa.begin(), sa.end(), 0);
      feedback.clear();
    }
    const auto &c_spk = ctx_cursor.at(t);
    const auto &s_spk = stim_cursor.at(t);
    for (std::size_t j = 0; j < n; ++j) {
      const auto &p = params[j];
      // SWM: AND-gate every synapse, then reduce.
      const auto wc = weights.context.row(j);
      for (std::size_t i = 0; i < wc.size(); ++i)
        ctx_terms[i] = gate_weight(c_spk[i], wc[i]);
      const auto ws = weights.soma.row(j);
      for (std::size_t i = 0; i < ws.size(); ++i)
        som_terms[i] = gate_weight(s_spk[i], ws[i]);
      const auto wr = weights.recurrent.row(j);
      for (std::size_t i = 0; i < n; ++i)
        som_terms[ws.size() + i] = gate_weight(feedback[i], wr[i]);
      const auto swm_con =
          latch(swm_reduce(ctx_terms, config).sum, N, policy, "SWM context");
      const auto swm_som =
          latch(swm_reduce(som_terms, config).sum, N, policy, "SWM somatic");

      // AC: leakage subtractor, apical accumulator, sign-bit reset.
      const auto ls = aa[j] - p.alpha_leak;
      auto acc = latch(ls + swm_con, N, policy, "AA");
      if (acc < 0)
        acc = 0;
      aa[j] = acc;

      // MU: 2N-bit product of the apical output and the somatic drive.
      const auto product = mu_multiply(aa[j], swm_som, N);

      // SC: somatic leakage subtractor, somatic accumulator, sign-bit reset.
      const auto sls = sa[j] - p.beta_leak;
      const __int128 wide = static_cast<__int128>(sls) + product;
      std::int64_t s_acc;
      if (wide > signed_max(config.somatic_width) ||
          wide < signed_min(config.somatic_width)) {
        if (policy == OverflowPolicy::error)
          throw OverflowError("SA value exceeds " +
                              std::to_string(config.somatic_width) +
                              "-bit register");
        s_acc = wide < 0 ? signed_min(config.somatic_width)
                         : signed_max(config.somatic_width);
      } else {
        s_acc = static_cast<std::int64_t>(wide);
      }
      if (s_acc < 0)
        s_acc = 0;

      // TC: compare; the spike line drives RESET on the somatic register.
      const bool spike = s_acc >= p.v_threshold;
      sa[j] = spike ? 0 : s_acc;
      next_feedback.set(j, spike);
      run.raster.bits[t * n + j] = spike;

      if (record_trace)
        run.trace.records.push_back({t, static_cast<std::uint32_t>(j), swm_con,
                                     swm_som, aa[j], product, sa[j], spike});
    }
    std::swap(feedback, next_feedback);
  }
  return run;
}

} // namespace qclif
