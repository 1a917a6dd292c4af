#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace qclif {

// std::mt19937_64 with distribution code written out here, since the standard
// distributions are not specified bit-for-bit across library implementations.
class PortableRng {
public:
  explicit PortableRng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  // 53-bit uniform in [0, 1).
  double uniform() {
    return static_cast<double>(gen_() >> 11) * (1.0 / 9007199254740992.0);
  }

  // Box-Muller, one variate per call.
  double normal(double mean = 0.0, double sigma = 1.0) {
    const double u1 = 1.0 - uniform(); // (0, 1]
    const double u2 = uniform();
    return mean + sigma * std::sqrt(-2.0 * std::log(u1)) *
                      std::cos(2.0 * std::numbers::pi * u2);
  }

private:
  std::mt19937_64 gen_;
};

} // namespace qclif
