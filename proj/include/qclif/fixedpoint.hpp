#pragma once

#include <cstdint>
#include <string>

#include "qclif/error.hpp"

namespace qclif {

// Exact positive-or-negative rational with int64 terms, always reduced and
// with a positive denominator.
class Rational {
public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }
  double to_double() const noexcept {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  // Parses "3", "-7/4" or a plain decimal such as "1.342".
  static Rational parse(const std::string &text);

  // Exact decimal rendering; repeating expansions are cut at `max_digits`
  // fractional digits.
  std::string to_decimal(int max_digits = 12) const;

  friend bool operator==(const Rational &, const Rational &) = default;
  friend Rational operator*(const Rational &a, const Rational &b);
  friend Rational operator*(std::int64_t k, const Rational &r) {
    return Rational(k) * r;
  }

private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

inline constexpr int kMinWidth = 2;
inline constexpr int kMaxWidth = 64;

constexpr std::int64_t signed_max(int width) noexcept {
  return width >= 64 ? INT64_MAX : (std::int64_t{1} << (width - 1)) - 1;
}
constexpr std::int64_t signed_min(int width) noexcept {
  return width >= 64 ? INT64_MIN : -(std::int64_t{1} << (width - 1));
}
constexpr bool fits_signed(std::int64_t v, int width) noexcept {
  return v >= signed_min(width) && v <= signed_max(width);
}

// Signed two's-complement value of a fixed bit width. real = raw * scale.
class FixedPointValue {
public:
  FixedPointValue(std::int64_t raw, int width, Rational scale = Rational(1));

  std::int64_t raw() const noexcept { return raw_; }
  int width() const noexcept { return width_; }
  const Rational &scale() const noexcept { return scale_; }
  double to_double() const noexcept {
    return static_cast<double>(raw_) * scale_.to_double();
  }

private:
  std::int64_t raw_;
  int width_;
  Rational scale_;
};

struct WidthReport {
  std::int64_t terms = 0;
  int term_width = 0;
  int required_width = 0;
  std::int64_t max_abs_sum = 0;
  bool is_signed = false;
};

// Exact sum; throws OverflowError when the result does not fit out_width.
FixedPointValue add_exact(const FixedPointValue &a, const FixedPointValue &b,
                          int out_width);

// Smallest width holding terms * term_max_abs. Signed widths add one bit for
// the sign, so the negated bound fits as well.
WidthReport required_accumulator_width(std::int64_t terms,
                                       std::int64_t term_max_abs,
                                       bool is_signed);

// Clamp into the representable range of `width` bits. Unsigned results hold
// a raw value in [0, 2^width - 1] inside a signed container of width + 1 bits,
// so unsigned widths stop at 63.
FixedPointValue saturate(std::int64_t value, int width, bool is_signed);

// Minimal bit count for a non-negative magnitude (0 needs 1 bit).
int bit_length(std::uint64_t magnitude) noexcept;

} // namespace qclif
