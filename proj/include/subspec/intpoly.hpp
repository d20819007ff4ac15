#pragma once

#include <Eigen/Core>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace subspec {

using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using IntVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

/// Polynomial with int64 coefficients, stored low degree first.
/// Arithmetic is overflow-checked and throws NumericalError on overflow.
class IntPoly {
 public:
  IntPoly() = default;
  explicit IntPoly(std::vector<std::int64_t> coeffs);

  static IntPoly monomial(int degree, std::int64_t coeff = 1);

  int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for zero
  bool is_zero() const { return c_.empty(); }
  std::int64_t operator[](int i) const { return i < static_cast<int>(c_.size()) ? c_[i] : 0; }
  const std::vector<std::int64_t>& coeffs() const { return c_; }
  std::int64_t leading() const { return c_.empty() ? 0 : c_.back(); }

  IntPoly operator+(const IntPoly& o) const;
  IntPoly operator-(const IntPoly& o) const;
  IntPoly operator*(const IntPoly& o) const;
  bool operator==(const IntPoly& o) const = default;

  /// Exact quotient if `divisor` (monic or with unit leading coefficient) divides
  /// this polynomial over Z, otherwise nullopt.
  std::optional<IntPoly> exact_divide(const IntPoly& divisor) const;
  bool divisible_by(const IntPoly& divisor) const { return exact_divide(divisor).has_value(); }

  std::complex<long double> eval(std::complex<long double> x) const;
  long double eval(long double x) const;

  /// Roots with multiplicity. Companion-matrix eigenvalues refined by Newton.
  std::vector<std::complex<double>> roots() const;

  /// e.g. "x^2 - x - 1"
  std::string to_string() const;

 private:
  void trim();
  std::vector<std::int64_t> c_;
};

/// det(xI - M), computed exactly.
IntPoly characteristic_polynomial(const IntMatrix& m);

/// n-th cyclotomic polynomial.
IntPoly cyclotomic(int n);
int euler_phi(int n);

/// Orders n with phi(n) <= deg(p) whose cyclotomic polynomial divides p.
std::vector<int> cyclotomic_factor_orders(const IntPoly& p);

/// Factorization of a monic polynomial into irreducible monic factors over Z.
struct Factorization {
  std::vector<IntPoly> factors;  // with repetition, sorted by degree
  bool complete = true;          // false when the degree exceeds the exact bound
};

/// Exact for degree <= max_degree: integer roots are split off first, and the
/// remaining candidates come from products of conjugation-closed root subsets,
/// each confirmed by exact division.
Factorization factor_monic(const IntPoly& p, int max_degree = 8);

/// Integer matrix helpers with overflow checks.
IntMatrix checked_multiply(const IntMatrix& a, const IntMatrix& b);
IntMatrix checked_power(const IntMatrix& a, int n);
std::int64_t checked_add(std::int64_t a, std::int64_t b);
std::int64_t checked_mul(std::int64_t a, std::int64_t b);

}  // namespace subspec
