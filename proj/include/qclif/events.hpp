#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "qclif/error.hpp"
#include "qclif/neuron.hpp"

namespace qclif {

struct Event {
  std::uint32_t timestep = 0;
  std::uint32_t channel = 0;

  friend auto operator<=>(const Event &, const Event &) = default;
};

// Timestamped spikes on `channel_count` channels over `duration` cycles.
struct EventStream {
  std::vector<Event> events;
  std::uint32_t channel_count = 0;
  std::uint64_t duration = 0;

  // Throws InvariantViolation when timesteps decrease, a channel is out of
  // range, or an event lies beyond the duration.
  void validate() const;

  friend bool operator==(const EventStream &, const EventStream &) = default;
};

// Sorted by (timestep, channel) with duplicates removed; duration grows to
// cover the last event if needed.
EventStream canonicalize(EventStream s);

// Output spikes of a layer, one row of neuron bits per cycle.
struct SpikeRaster {
  std::size_t neuron_count = 0;
  std::uint64_t cycles = 0;
  std::vector<std::uint8_t> bits; // cycles x neuron_count

  static SpikeRaster empty(std::size_t neurons, std::uint64_t cycles) {
    return {neurons, cycles,
            std::vector<std::uint8_t>(neurons * cycles, 0)};
  }
  bool at(std::uint64_t cycle, std::size_t neuron) const noexcept {
    return bits[cycle * neuron_count + neuron] != 0;
  }
  std::uint64_t total_spikes() const noexcept;

  friend bool operator==(const SpikeRaster &, const SpikeRaster &) = default;
};

EventStream raster_to_events(const SpikeRaster &raster);
SpikeRaster events_to_raster(const EventStream &stream);

// Walks a canonical stream cycle by cycle and yields dense spike vectors.
class StreamCursor {
public:
  explicit StreamCursor(const EventStream &stream);

  // Spike vector for `cycle`; cycles must be requested in increasing order.
  const SpikeVector &at(std::uint64_t cycle);

private:
  const EventStream *stream_;
  std::size_t next_ = 0;
  SpikeVector current_;
};

class ParseError : public IoError {
public:
  ParseError(const std::string &what, std::uint64_t position)
      : IoError("parse error at " + std::to_string(position) + ": " + what),
        position_(position) {}
  // Line number for text input, byte offset for binary input.
  std::uint64_t position() const noexcept { return position_; }

private:
  std::uint64_t position_;
};

class InvariantViolation : public IoError {
public:
  explicit InvariantViolation(const std::string &what)
      : IoError("invariant violation: " + what) {}
};

// Text format: optional "# channels=<n> duration=<t>" line, then the header
// "timestep,channel" and one event per line. Without the comment line the
// channel count and duration are inferred from the events.
void write_events_text(std::ostream &os, const EventStream &s);
EventStream read_events_text(std::istream &is);

// Binary format, little-endian:
//   "QSNN" | u8 version (1) | u32 channel_count | u64 event_count |
//   event_count x (u32 timestep, u32 channel)
// The duration is not stored; readers set it to last timestep + 1.
inline constexpr std::uint8_t kBinaryVersion = 1;
std::vector<std::uint8_t> encode_events_binary(const EventStream &s);
EventStream decode_events_binary(std::span<const std::uint8_t> bytes);

// Picks the format from the extension (".qsnn" is binary, anything else text).
void write_event_file(const std::filesystem::path &path, const EventStream &s);
// Sniffs the magic bytes; falls back to text.
EventStream read_event_file(const std::filesystem::path &path);

class RateOutOfRange : public ConfigError {
public:
  explicit RateOutOfRange(const std::string &what)
      : ConfigError("rate out of range: " + what) {}
};

// Independent Bernoulli(p) per cycle and channel with
// p = rate_hz * dt_ms / 1000. Draws come from std::mt19937_64 seeded with
// `seed`, visiting cycles in order and channels in order within a cycle; a
// draw u = (next() >> 11) * 2^-53 spikes when u < p.
EventStream poisson_stream(double rate_hz, double dt_ms,
                           std::uint32_t channels, std::uint64_t duration,
                           std::uint64_t seed);

// Per-channel spike probabilities, same draw order as poisson_stream.
EventStream bernoulli_stream(std::span<const double> probabilities,
                             std::uint64_t duration, std::uint64_t seed);

} // namespace qclif
