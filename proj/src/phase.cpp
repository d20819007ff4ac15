#include "subspec/phase.hpp"

#include <cmath>
#include <numbers>

namespace subspec {

namespace {
constexpr long double two64 = 18446744073709551616.0L;
}

Phase Phase::from_real(long double x) {
  long double f = x - std::floor(x);
  if (f >= 1.0L) f = 0.0L;  // rounding of values just below an integer
  const long double scaled = f * two64;
  const auto hi = static_cast<std::uint64_t>(scaled);
  const long double rest = (scaled - static_cast<long double>(hi)) * two64;
  const auto lo = rest > 0.0L ? static_cast<std::uint64_t>(rest) : std::uint64_t{0};
  return from_bits((static_cast<Bits>(hi) << 64) | lo);
}

long double Phase::value() const {
  const auto hi = static_cast<std::uint64_t>(bits_ >> 64);
  const auto lo = static_cast<std::uint64_t>(bits_);
  return (static_cast<long double>(hi) + static_cast<long double>(lo) / two64) / two64;
}

long double Phase::distance_to_integer() const {
  const long double v = value();
  return v <= 0.5L ? v : 1.0L - v;
}

std::complex<double> Phase::character() const {
  // Quarter turns are exact, so cancellations at these points are exact zeros.
  if ((bits_ << 2) == 0) {
    switch (static_cast<int>(bits_ >> 126)) {
      case 0:
        return {1.0, 0.0};
      case 1:
        return {0.0, -1.0};
      case 2:
        return {-1.0, 0.0};
      default:
        return {0.0, 1.0};
    }
  }
  // Fold into (-1/2, 1/2] first so the angle passed to sin/cos is small.
  long double v = value();
  if (v > 0.5L) v -= 1.0L;
  const long double angle = -2.0L * std::numbers::pi_v<long double> * v;
  return {static_cast<double>(std::cos(angle)), static_cast<double>(std::sin(angle))};
}

Phase Phase::times(std::int64_t k) const {
  // Two's-complement wraparound gives the product modulo 2^128.
  const Bits mult = static_cast<Bits>(static_cast<__int128>(k));
  return from_bits(bits_ * mult);
}

Phase Phase::times(__int128 k) const { return from_bits(bits_ * static_cast<Bits>(k)); }

}  // namespace subspec
