#include "qclif/fixedpoint.hpp"

#include <bit>
#include <cstdlib>
#include <numeric>

namespace qclif {

const char *category_name(ErrorCategory c) noexcept {
  switch (c) {
  case ErrorCategory::usage:
    return "usage";
  case ErrorCategory::config:
    return "config";
  case ErrorCategory::io:
    return "io";
  case ErrorCategory::numeric:
    return "numeric";
  }
  return "unknown";
}

namespace {

std::int64_t narrow(__int128 v, const char *what) {
  if (v > INT64_MAX || v < INT64_MIN)
    throw OverflowError(std::string("rational ") + what + " exceeds int64");
  return static_cast<std::int64_t>(v);
}

} // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0)
    throw ConfigError("rational with zero denominator");
  if (den < 0) {
    if (num == INT64_MIN || den == INT64_MIN)
      throw OverflowError("rational sign normalization");
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  num_ = g ? num / g : 0;
  den_ = g ? den / g : 1;
}

Rational operator*(const Rational &a, const Rational &b) {
  const __int128 n = static_cast<__int128>(a.num_) * b.num_;
  const __int128 d = static_cast<__int128>(a.den_) * b.den_;
  // reduce in 128 bits before narrowing
  __int128 x = n < 0 ? -n : n, y = d;
  while (y != 0) {
    const __int128 t = x % y;
    x = y;
    y = t;
  }
  const __int128 g = x == 0 ? 1 : x;
  return Rational(narrow(n / g, "numerator"), narrow(d / g, "denominator"));
}

Rational Rational::parse(const std::string &text) {
  if (text.empty())
    throw ConfigError("empty rational");
  if (const auto slash = text.find('/'); slash != std::string::npos) {
    std::size_t used = 0;
    const auto n = std::stoll(text.substr(0, slash), &used);
    const auto rest = text.substr(slash + 1);
    std::size_t used_d = 0;
    const auto d = std::stoll(rest, &used_d);
    if (used != slash || used_d != rest.size())
      throw ConfigError("malformed rational '" + text + "'");
    return Rational(n, d);
  }
  std::size_t i = 0;
  bool negative = false;
  if (text[i] == '-' || text[i] == '+')
    negative = text[i++] == '-';
  std::int64_t num = 0, den = 1;
  bool seen_point = false, seen_digit = false;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '.' && !seen_point) {
      seen_point = true;
      continue;
    }
    if (c < '0' || c > '9')
      throw ConfigError("malformed rational '" + text + "'");
    seen_digit = true;
    num = narrow(static_cast<__int128>(num) * 10 + (c - '0'), "literal");
    if (seen_point)
      den = narrow(static_cast<__int128>(den) * 10, "literal");
  }
  if (!seen_digit)
    throw ConfigError("malformed rational '" + text + "'");
  return Rational(negative ? -num : num, den);
}

std::string Rational::to_decimal(int max_digits) const {
  std::string out;
  if (num_ < 0)
    out += '-';
  const unsigned __int128 mag =
      num_ < 0 ? static_cast<unsigned __int128>(-static_cast<__int128>(num_))
               : static_cast<unsigned __int128>(num_);
  const auto den = static_cast<unsigned __int128>(den_);
  out += std::to_string(static_cast<std::uint64_t>(mag / den));
  unsigned __int128 rem = mag % den;
  if (rem == 0)
    return out;
  out += '.';
  for (int i = 0; i < max_digits && rem != 0; ++i) {
    rem *= 10;
    out += static_cast<char>('0' + static_cast<int>(rem / den));
    rem %= den;
  }
  return out;
}

FixedPointValue::FixedPointValue(std::int64_t raw, int width, Rational scale)
    : raw_(raw), width_(width), scale_(scale) {
  if (width < kMinWidth || width > kMaxWidth)
    throw ConfigError("fixed-point width " + std::to_string(width) +
                      " outside [2, 64]");
  if (scale.num() <= 0)
    throw ConfigError("fixed-point scale must be positive");
  if (!fits_signed(raw, width))
    throw OverflowError(std::to_string(raw) + " does not fit in " +
                        std::to_string(width) + " signed bits");
}

FixedPointValue add_exact(const FixedPointValue &a, const FixedPointValue &b,
                          int out_width) {
  if (!(a.scale() == b.scale()))
    throw ScaleMismatch(a.scale().to_decimal() + " vs " +
                        b.scale().to_decimal());
  const __int128 sum = static_cast<__int128>(a.raw()) + b.raw();
  if (out_width < kMinWidth || out_width > kMaxWidth)
    throw ConfigError("output width outside [2, 64]");
  if (sum > signed_max(out_width) || sum < signed_min(out_width))
    throw OverflowError("sum does not fit in " + std::to_string(out_width) +
                        " signed bits");
  return FixedPointValue(static_cast<std::int64_t>(sum), out_width,
                         a.scale());
}

int bit_length(std::uint64_t magnitude) noexcept {
  return magnitude == 0 ? 1 : static_cast<int>(std::bit_width(magnitude));
}

WidthReport required_accumulator_width(std::int64_t terms,
                                       std::int64_t term_max_abs,
                                       bool is_signed) {
  if (terms < 1 || term_max_abs < 0)
    throw ConfigError("accumulator sizing needs terms >= 1 and max >= 0");
  const __int128 total = static_cast<__int128>(terms) * term_max_abs;
  if (total > INT64_MAX)
    throw OverflowError("worst-case sum exceeds int64");
  WidthReport r;
  r.terms = terms;
  r.is_signed = is_signed;
  r.max_abs_sum = static_cast<std::int64_t>(total);
  r.term_width = bit_length(static_cast<std::uint64_t>(term_max_abs)) +
                 (is_signed ? 1 : 0);
  // A zero sum still needs one bit; a signed zero-magnitude accumulator is
  // reported the same way since no sign is ever stored.
  r.required_width =
      r.max_abs_sum == 0
          ? 1
          : bit_length(static_cast<std::uint64_t>(r.max_abs_sum)) +
                (is_signed ? 1 : 0);
  return r;
}

FixedPointValue saturate(std::int64_t value, int width, bool is_signed) {
  if (width < kMinWidth || width > kMaxWidth)
    throw ConfigError("saturation width outside [2, 64]");
  if (is_signed) {
    const auto lo = signed_min(width), hi = signed_max(width);
    return FixedPointValue(value < lo ? lo : (value > hi ? hi : value), width);
  }
  if (width > 63)
    throw ConfigError("unsigned saturation limited to 63 bits");
  const std::int64_t hi = (std::int64_t{1} << width) - 1;
  const std::int64_t clamped = value < 0 ? 0 : (value > hi ? hi : value);
  // Carried in a signed container one bit wider.
  return FixedPointValue(clamped, width + 1);
}

} // namespace qclif
