#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "qclif/events.hpp"
#include "qclif/layer.hpp"
#include "qclif/neuron.hpp"

namespace testutil {

inline std::int64_t uniform_in(std::mt19937_64 &g, std::int64_t lo,
                               std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(g);
}

inline qclif::Matrix<std::int32_t> random_matrix(std::mt19937_64 &g,
                                                 std::size_t rows,
                                                 std::size_t cols, int width) {
  qclif::Matrix<std::int32_t> m(rows, cols);
  for (auto &w : m.data())
    w = static_cast<std::int32_t>(uniform_in(g, qclif::signed_min(width),
                                             qclif::signed_max(width)));
  return m;
}

inline qclif::WeightSet random_weights(std::mt19937_64 &g, std::size_t neurons,
                                       std::size_t context,
                                       std::size_t stimulus, int width) {
  return {random_matrix(g, neurons, context, width),
          random_matrix(g, neurons, stimulus, width),
          random_matrix(g, neurons, neurons, width)};
}

inline qclif::SpikeVector random_spikes(std::mt19937_64 &g, std::size_t n,
                                        double p) {
  qclif::SpikeVector s(n);
  std::bernoulli_distribution b(p);
  for (std::size_t i = 0; i < n; ++i)
    s.set(i, b(g));
  return s;
}

inline qclif::EventStream random_stream(std::mt19937_64 &g,
                                        std::uint32_t channels,
                                        std::uint64_t duration, double p) {
  qclif::EventStream s;
  s.channel_count = channels;
  s.duration = duration;
  std::bernoulli_distribution b(p);
  for (std::uint64_t t = 0; t < duration; ++t)
    for (std::uint32_t c = 0; c < channels; ++c)
      if (b(g))
        s.events.push_back({static_cast<std::uint32_t>(t), c});
  return s;
}

} // namespace testutil
