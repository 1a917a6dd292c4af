#include "qclif/events.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <random>
#include <sstream>

namespace qclif {

void EventStream::validate() const {
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto &e = events[i];
    if (i > 0 && e.timestep < events[i - 1].timestep)
      throw InvariantViolation("timestep decreases at event " +
                               std::to_string(i));
    if (e.channel >= channel_count)
      throw InvariantViolation("channel " + std::to_string(e.channel) +
                               " >= channel count " +
                               std::to_string(channel_count));
    if (e.timestep >= duration)
      throw InvariantViolation("event at " + std::to_string(e.timestep) +
                               " beyond duration " + std::to_string(duration));
  }
}

EventStream canonicalize(EventStream s) {
  std::sort(s.events.begin(), s.events.end());
  s.events.erase(std::unique(s.events.begin(), s.events.end()),
                 s.events.end());
  if (!s.events.empty())
    s.duration =
        std::max<std::uint64_t>(s.duration, s.events.back().timestep + 1ULL);
  return s;
}

std::uint64_t SpikeRaster::total_spikes() const noexcept {
  std::uint64_t n = 0;
  for (auto b : bits)
    n += b != 0;
  return n;
}

EventStream raster_to_events(const SpikeRaster &raster) {
  EventStream s;
  s.channel_count = static_cast<std::uint32_t>(raster.neuron_count);
  s.duration = raster.cycles;
  for (std::uint64_t t = 0; t < raster.cycles; ++t)
    for (std::size_t j = 0; j < raster.neuron_count; ++j)
      if (raster.at(t, j))
        s.events.push_back(
            {static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(j)});
  return s;
}

SpikeRaster events_to_raster(const EventStream &stream) {
  stream.validate();
  auto r = SpikeRaster::empty(stream.channel_count, stream.duration);
  for (const auto &e : stream.events)
    r.bits[e.timestep * r.neuron_count + e.channel] = 1;
  return r;
}

StreamCursor::StreamCursor(const EventStream &stream)
    : stream_(&stream), current_(stream.channel_count) {}

const SpikeVector &StreamCursor::at(std::uint64_t cycle) {
  current_.clear();
  const auto &ev = stream_->events;
  while (next_ < ev.size() && ev[next_].timestep < cycle)
    ++next_;
  while (next_ < ev.size() && ev[next_].timestep == cycle) {
    current_.set(ev[next_].channel);
    ++next_;
  }
  return current_;
}

// ---- text ----

void write_events_text(std::ostream &os, const EventStream &s) {
  const auto c = canonicalize(s);
  c.validate();
  os << "# channels=" << c.channel_count << " duration=" << c.duration
     << '\n';
  os << "timestep,channel\n";
  for (const auto &e : c.events)
    os << e.timestep << ',' << e.channel << '\n';
}

namespace {

std::uint64_t parse_u64(const std::string &field, std::uint64_t line,
                        std::uint64_t max) {
  if (field.empty() ||
      !std::all_of(field.begin(), field.end(),
                   [](char ch) { return ch >= '0' && ch <= '9'; }))
    throw ParseError("expected unsigned integer, got '" + field + "'", line);
  std::uint64_t v = 0;
  for (char ch : field) {
    if (v > (max - static_cast<std::uint64_t>(ch - '0')) / 10)
      throw ParseError("integer '" + field + "' out of range", line);
    v = v * 10 + static_cast<std::uint64_t>(ch - '0');
  }
  return v;
}

} // namespace

EventStream read_events_text(std::istream &is) {
  EventStream s;
  bool have_meta = false, have_header = false;
  std::string line;
  std::uint64_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    if (line[0] == '#') {
      std::istringstream meta(line.substr(1));
      std::string kv;
      while (meta >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
          continue;
        const auto key = kv.substr(0, eq), val = kv.substr(eq + 1);
        if (key == "channels") {
          s.channel_count =
              static_cast<std::uint32_t>(parse_u64(val, lineno, UINT32_MAX));
          have_meta = true;
        } else if (key == "duration") {
          s.duration = parse_u64(val, lineno, UINT64_MAX);
        }
      }
      continue;
    }
    if (!have_header) {
      if (line != "timestep,channel")
        throw ParseError("expected header 'timestep,channel'", lineno);
      have_header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw ParseError("expected 'timestep,channel'", lineno);
    Event e;
    e.timestep = static_cast<std::uint32_t>(
        parse_u64(line.substr(0, comma), lineno, UINT32_MAX));
    e.channel = static_cast<std::uint32_t>(
        parse_u64(line.substr(comma + 1), lineno, UINT32_MAX));
    if (!s.events.empty() && e.timestep < s.events.back().timestep)
      throw InvariantViolation("timestep decreases at line " +
                               std::to_string(lineno));
    s.events.push_back(e);
  }
  if (!have_header)
    throw ParseError("missing header", lineno);
  if (!have_meta) {
    std::uint32_t max_ch = 0;
    for (const auto &e : s.events)
      max_ch = std::max(max_ch, e.channel + 1);
    s.channel_count = max_ch;
  }
  if (!s.events.empty())
    s.duration =
        std::max<std::uint64_t>(s.duration, s.events.back().timestep + 1ULL);
  s.validate();
  return s;
}

// ---- binary ----

namespace {

constexpr char kMagic[4] = {'Q', 'S', 'N', 'N'};

template <typename T> void put_le(std::vector<std::uint8_t> &out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i)
    out.push_back(static_cast<std::uint8_t>(
        (static_cast<std::uint64_t>(v) >> (8 * i)) & 0xFF));
}

template <typename T>
T get_le(std::span<const std::uint8_t> bytes, std::size_t &pos) {
  if (bytes.size() - pos < sizeof(T))
    throw ParseError("truncated input", pos);
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i)
    v |= static_cast<std::uint64_t>(bytes[pos + i]) << (8 * i);
  pos += sizeof(T);
  return static_cast<T>(v);
}

} // namespace

std::vector<std::uint8_t> encode_events_binary(const EventStream &s) {
  const auto c = canonicalize(s);
  c.validate();
  std::vector<std::uint8_t> out;
  out.reserve(17 + 8 * c.events.size());
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  out.push_back(kBinaryVersion);
  put_le<std::uint32_t>(out, c.channel_count);
  put_le<std::uint64_t>(out, c.events.size());
  for (const auto &e : c.events) {
    put_le<std::uint32_t>(out, e.timestep);
    put_le<std::uint32_t>(out, e.channel);
  }
  return out;
}

EventStream decode_events_binary(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw ParseError("bad magic", 0);
  std::size_t pos = 4;
  const auto version = get_le<std::uint8_t>(bytes, pos);
  if (version != kBinaryVersion)
    throw ParseError("unsupported version " + std::to_string(version), 4);
  EventStream s;
  s.channel_count = get_le<std::uint32_t>(bytes, pos);
  const auto count = get_le<std::uint64_t>(bytes, pos);
  if ((bytes.size() - pos) / 8 < count)
    throw ParseError("truncated input: " + std::to_string(count) +
                         " events declared",
                     bytes.size());
  s.events.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    Event e;
    e.timestep = get_le<std::uint32_t>(bytes, pos);
    e.channel = get_le<std::uint32_t>(bytes, pos);
    s.events.push_back(e);
  }
  if (pos != bytes.size())
    throw ParseError("trailing bytes", pos);
  if (!s.events.empty())
    s.duration = s.events.back().timestep + 1ULL;
  s.validate();
  return s;
}

void write_event_file(const std::filesystem::path &path,
                      const EventStream &s) {
  std::ofstream os(path, std::ios::binary);
  if (!os)
    throw IoError("cannot open '" + path.string() + "' for writing");
  if (path.extension() == ".qsnn") {
    const auto bytes = encode_events_binary(s);
    os.write(reinterpret_cast<const char *>(bytes.data()),
             static_cast<std::streamsize>(bytes.size()));
  } else {
    write_events_text(os, s);
  }
  if (!os)
    throw IoError("write to '" + path.string() + "' failed");
}

EventStream read_event_file(const std::filesystem::path &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is)
    throw IoError("cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)),
                                  std::istreambuf_iterator<char>());
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), kMagic, 4) == 0)
    return decode_events_binary(bytes);
  std::istringstream text(std::string(bytes.begin(), bytes.end()));
  return read_events_text(text);
}

// ---- generators ----

EventStream bernoulli_stream(std::span<const double> probabilities,
                             std::uint64_t duration, std::uint64_t seed) {
  for (double p : probabilities)
    if (!(p >= 0.0 && p <= 1.0))
      throw RateOutOfRange("spike probability " + std::to_string(p));
  if (duration > UINT32_MAX)
    throw ConfigError("duration exceeds 32-bit timestep range");
  EventStream s;
  s.channel_count = static_cast<std::uint32_t>(probabilities.size());
  s.duration = duration;
  std::mt19937_64 gen(seed);
  constexpr double kInv53 = 1.0 / 9007199254740992.0;
  for (std::uint64_t t = 0; t < duration; ++t)
    for (std::uint32_t ch = 0; ch < s.channel_count; ++ch) {
      const double u = static_cast<double>(gen() >> 11) * kInv53;
      if (u < probabilities[ch])
        s.events.push_back({static_cast<std::uint32_t>(t), ch});
    }
  return s;
}

EventStream poisson_stream(double rate_hz, double dt_ms,
                           std::uint32_t channels, std::uint64_t duration,
                           std::uint64_t seed) {
  const double p = rate_hz * dt_ms / 1000.0;
  if (!std::isfinite(p) || p < 0.0 || p > 1.0)
    throw RateOutOfRange("rate " + std::to_string(rate_hz) + " Hz at dt " +
                         std::to_string(dt_ms) + " ms gives p = " +
                         std::to_string(p));
  const std::vector<double> probs(channels, p);
  return bernoulli_stream(probs, duration, seed);
}

} // namespace qclif
