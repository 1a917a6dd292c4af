#include "qclif/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "qclif/quantize.hpp"
#include "qclif/rng.hpp"

namespace qclif {

const char *mode_name(Mode m) noexcept {
  return m == Mode::datapath ? "datapath" : "functional";
}

Mode parse_mode(const std::string &s) {
  if (s == "functional")
    return Mode::functional;
  if (s == "datapath")
    return Mode::datapath;
  throw ConfigError("unknown mode '" + s + "' (functional | datapath)");
}

namespace {

std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T> T parse_int(const std::string &key, const std::string &v) {
  T out{};
  const auto *end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || ptr != end)
    throw ConfigError("key '" + key + "': expected integer, got '" + v + "'");
  return out;
}

double parse_real(const std::string &key, const std::string &v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size())
      throw std::invalid_argument(v);
    return d;
  } catch (const std::exception &) {
    throw ConfigError("key '" + key + "': expected number, got '" + v + "'");
  }
}

std::vector<std::int64_t> parse_list(const std::string &key,
                                     const std::string &v) {
  std::vector<std::int64_t> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ','))
    out.push_back(parse_int<std::int64_t>(key, trim(item)));
  if (out.empty())
    throw ConfigError("key '" + key + "': empty list");
  return out;
}

std::string join(const std::vector<std::int64_t> &v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i)
    s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::int64_t per_neuron(const std::vector<std::int64_t> &v, std::size_t j) {
  return v.size() == 1 ? v.front() : v[j];
}

} // namespace

void RunConfig::validate() const {
  if (neuron_count < 1 || stimulus_channels < 1 || context_channels < 1)
    throw ConfigError("neuron and channel counts must be >= 1");
  if (cycles < 1)
    throw ConfigError("cycles must be >= 1");
  for (const auto *v : {&alpha_leak, &beta_leak, &threshold})
    if (v->size() != 1 && v->size() != neuron_count)
      throw ConfigError("per-neuron lists must have one entry or "
                        "neuron_count entries");
  if (context_target >= context_channels)
    throw ConfigError("context_target outside context channels");
  if (!(dt_ms > 0.0))
    throw ConfigError("dt_ms must be positive");
  for (const auto &p : neuron_params())
    p.validate();
}

std::vector<NeuronParams> RunConfig::neuron_params() const {
  std::vector<NeuronParams> out(neuron_count);
  for (std::size_t j = 0; j < out.size(); ++j) {
    auto &p = out[j];
    p.alpha_leak = per_neuron(alpha_leak, j);
    p.beta_leak = per_neuron(beta_leak, j);
    p.v_threshold = per_neuron(threshold, j);
    p.apical_width = apical_width;
    p.somatic_width = somatic_width;
    p.weight_width = weight_width;
    p.overflow = overflow;
  }
  return out;
}

RunConfig parse_run_config(std::istream &is) {
  RunConfig c;
  std::string line;
  int lineno = 0;
  bool have_version = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.resize(hash);
    line = trim(line);
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) +
                        ": expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto val = trim(line.substr(eq + 1));
    if (!have_version) {
      if (key != "version")
        throw ConfigError("config must start with 'version = 1'");
      if (val != "1")
        throw ConfigError("unsupported config version '" + val + "'");
      have_version = true;
      continue;
    }
    if (key == "neuron_count")
      c.neuron_count = parse_int<std::uint32_t>(key, val);
    else if (key == "stimulus_channels")
      c.stimulus_channels = parse_int<std::uint32_t>(key, val);
    else if (key == "context_channels")
      c.context_channels = parse_int<std::uint32_t>(key, val);
    else if (key == "weight_width")
      c.weight_width = parse_int<int>(key, val);
    else if (key == "apical_width")
      c.apical_width = parse_int<int>(key, val);
    else if (key == "somatic_width")
      c.somatic_width = parse_int<int>(key, val);
    else if (key == "alpha_leak")
      c.alpha_leak = parse_list(key, val);
    else if (key == "beta_leak")
      c.beta_leak = parse_list(key, val);
    else if (key == "threshold")
      c.threshold = parse_list(key, val);
    else if (key == "overflow") {
      if (val == "error")
        c.overflow = OverflowPolicy::error;
      else if (val == "saturate")
        c.overflow = OverflowPolicy::saturate;
      else
        throw ConfigError("overflow must be 'error' or 'saturate'");
    } else if (key == "seed")
      c.seed = parse_int<std::uint64_t>(key, val);
    else if (key == "cycles")
      c.cycles = parse_int<std::uint64_t>(key, val);
    else if (key == "trial_length")
      c.trial_length = parse_int<std::uint64_t>(key, val);
    else if (key == "mode")
      c.mode = parse_mode(val);
    else if (key == "dt_ms")
      c.dt_ms = parse_real(key, val);
    else if (key == "stimulus_rate_hz")
      c.stimulus_rate_hz = parse_real(key, val);
    else if (key == "context_rate_hz")
      c.context_rate_hz = parse_real(key, val);
    else if (key == "context_target")
      c.context_target = parse_int<std::uint32_t>(key, val);
    else if (key == "weights_file")
      c.weights_file = val;
    else if (key == "soma_sigma")
      c.soma_sigma = parse_real(key, val);
    else if (key == "apical_sigma")
      c.apical_sigma = parse_real(key, val);
    else if (key == "recurrent_sigma")
      c.recurrent_sigma = parse_real(key, val);
    else if (key == "energy_profile")
      c.energy_profile = val;
    else if (key == "energy_per_spike_pj")
      c.energy_per_spike_pj = Rational::parse(val);
    else if (key == "task_classes")
      c.task.classes = parse_int<std::uint32_t>(key, val);
    else if (key == "task_channels_per_class")
      c.task.channels_per_class = parse_int<std::uint32_t>(key, val);
    else if (key == "task_neurons_per_class")
      c.task.neurons_per_class = parse_int<std::uint32_t>(key, val);
    else if (key == "task_trial_length")
      c.task.trial_length = parse_int<std::uint64_t>(key, val);
    else if (key == "task_repeats")
      c.task.repeats = parse_int<std::uint32_t>(key, val);
    else if (key == "task_p_signal")
      c.task.p_signal = parse_real(key, val);
    else if (key == "task_p_noise")
      c.task.p_noise = parse_real(key, val);
    else
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" +
                        key + "'");
  }
  if (!have_version)
    throw ConfigError("config must start with 'version = 1'");
  c.task.seed = c.seed;
  c.task.dt_ms = c.dt_ms;
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path &path) {
  std::ifstream is(path);
  if (!is)
    throw IoError("cannot open config '" + path.string() + "'");
  auto c = parse_run_config(is);
  // Relative weight paths resolve against the config's directory.
  if (!c.weights_file.empty() &&
      std::filesystem::path(c.weights_file).is_relative())
    c.weights_file = (path.parent_path() / c.weights_file).string();
  return c;
}

void write_run_config(std::ostream &os, const RunConfig &c) {
  os << "version = 1\n"
     << "neuron_count = " << c.neuron_count << '\n'
     << "stimulus_channels = " << c.stimulus_channels << '\n'
     << "context_channels = " << c.context_channels << '\n'
     << "weight_width = " << c.weight_width << '\n'
     << "apical_width = " << c.apical_width << '\n'
     << "somatic_width = " << c.somatic_width << '\n'
     << "alpha_leak = " << join(c.alpha_leak) << '\n'
     << "beta_leak = " << join(c.beta_leak) << '\n'
     << "threshold = " << join(c.threshold) << '\n'
     << "overflow = "
     << (c.overflow == OverflowPolicy::saturate ? "saturate" : "error") << '\n'
     << "seed = " << c.seed << '\n'
     << "cycles = " << c.cycles << '\n'
     << "trial_length = " << c.trial_length << '\n'
     << "mode = " << mode_name(c.mode) << '\n'
     << "dt_ms = " << c.dt_ms << '\n'
     << "stimulus_rate_hz = " << c.stimulus_rate_hz << '\n'
     << "context_rate_hz = " << c.context_rate_hz << '\n'
     << "context_target = " << c.context_target << '\n'
     << "soma_sigma = " << c.soma_sigma << '\n'
     << "apical_sigma = " << c.apical_sigma << '\n'
     << "recurrent_sigma = " << c.recurrent_sigma << '\n'
     << "task_classes = " << c.task.classes << '\n'
     << "task_channels_per_class = " << c.task.channels_per_class << '\n'
     << "task_neurons_per_class = " << c.task.neurons_per_class << '\n'
     << "task_trial_length = " << c.task.trial_length << '\n'
     << "task_repeats = " << c.task.repeats << '\n'
     << "task_p_signal = " << c.task.p_signal << '\n'
     << "task_p_noise = " << c.task.p_noise << '\n';
  if (!c.weights_file.empty())
    os << "weights_file = " << c.weights_file << '\n';
  if (!c.energy_profile.empty())
    os << "energy_profile = " << c.energy_profile << '\n';
  if (c.energy_per_spike_pj)
    os << "energy_per_spike_pj = " << c.energy_per_spike_pj->num() << '/'
       << c.energy_per_spike_pj->den() << '\n';
}

WeightSet make_random_weights(const RunConfig &c) {
  PortableRng rng(c.seed ^ 0x9E3779B97F4A7C15ULL);
  const auto n = c.neuron_count;
  RealWeightSet real{Matrix<double>(n, c.context_channels),
                     Matrix<double>(n, c.stimulus_channels),
                     Matrix<double>(n, n)};
  for (auto &w : real.context.data())
    w = rng.normal(0.0, c.apical_sigma);
  for (auto &w : real.soma.data())
    w = rng.normal(0.0, c.soma_sigma);
  for (auto &w : real.recurrent.data())
    w = rng.normal(0.0, c.recurrent_sigma);
  const int bits = std::min(c.weight_width, 16);
  return quantize_weight_set(real, QuantizationSpec::soma(bits),
                             QuantizationSpec::apical(bits),
                             QuantizationSpec::recurrent(bits));
}

void write_weights(std::ostream &os, const WeightSet &w) {
  os << "qclif-weights 1\n";
  const auto dump = [&](const char *name, const Matrix<std::int32_t> &m) {
    os << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
    for (std::size_t r = 0; r < m.rows(); ++r) {
      const auto row = m.row(r);
      for (std::size_t i = 0; i < row.size(); ++i)
        os << (i ? " " : "") << row[i];
      os << '\n';
    }
  };
  dump("context", w.context);
  dump("soma", w.soma);
  dump("recurrent", w.recurrent);
}

WeightSet read_weights(std::istream &is) {
  std::string tag;
  int version = 0;
  if (!(is >> tag >> version) || tag != "qclif-weights" || version != 1)
    throw IoError("not a version-1 weight file");
  WeightSet w;
  const auto load = [&](const char *name, Matrix<std::int32_t> &m) {
    std::string got;
    std::size_t rows = 0, cols = 0;
    if (!(is >> got >> rows >> cols) || got != name)
      throw IoError(std::string("weight file: expected section '") + name +
                    "'");
    m = Matrix<std::int32_t>(rows, cols);
    for (auto &v : m.data())
      if (!(is >> v))
        throw IoError(std::string("weight file: truncated section '") + name +
                      "'");
  };
  load("context", w.context);
  load("soma", w.soma);
  load("recurrent", w.recurrent);
  return w;
}

WeightSet load_weights(const std::filesystem::path &path) {
  std::ifstream is(path);
  if (!is)
    throw IoError("cannot open weights '" + path.string() + "'");
  return read_weights(is);
}

void save_weights(const std::filesystem::path &path, const WeightSet &w) {
  std::ofstream os(path);
  if (!os)
    throw IoError("cannot write weights '" + path.string() + "'");
  write_weights(os, w);
}

} // namespace qclif
