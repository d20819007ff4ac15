#pragma once

#include <complex>
#include <cstdint>

namespace subspec {

/// A point of the circle R/Z stored as a 128-bit binary fraction.
///
/// Addition and multiplication by integers are exact modulo 1, so orbits of
/// integer toral endomorphisms (xi -> S^T xi) carry no accumulated rounding.
/// Conversion to and from floating point happens only at the boundaries.
class Phase {
 public:
  using Bits = unsigned __int128;

  constexpr Phase() = default;
  static constexpr Phase from_bits(Bits bits) {
    Phase p;
    p.bits_ = bits;
    return p;
  }
  /// Fractional part of x, using the full long double mantissa.
  static Phase from_real(long double x);

  constexpr Bits bits() const { return bits_; }
  /// Representative in [0, 1).
  long double value() const;
  /// Distance to the nearest integer, in [0, 1/2].
  long double distance_to_integer() const;
  /// exp(-2 pi i x).
  std::complex<double> character() const;

  constexpr Phase operator+(Phase o) const { return from_bits(bits_ + o.bits_); }
  constexpr Phase operator-(Phase o) const { return from_bits(bits_ - o.bits_); }
  constexpr Phase& operator+=(Phase o) {
    bits_ += o.bits_;
    return *this;
  }
  constexpr Phase operator-() const { return from_bits(Bits{0} - bits_); }
  /// k * x mod 1, exact.
  Phase times(std::int64_t k) const;
  /// k * x mod 1 for a 128-bit multiplier, exact.
  Phase times(__int128 k) const;

  constexpr bool operator==(const Phase&) const = default;

 private:
  Bits bits_ = 0;
};

}  // namespace subspec
