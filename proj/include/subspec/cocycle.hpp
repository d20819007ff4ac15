#pragma once

#include <Eigen/Core>
#include <complex>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "subspec/phase.hpp"
#include "subspec/substitution.hpp"

namespace subspec {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Point of the d-torus with exact 128-bit coordinates.
struct TorusPoint {
  std::vector<Phase> xi;

  static TorusPoint zero(int d) { return {std::vector<Phase>(d)}; }
  static TorusPoint from_reals(const std::vector<long double>& x);
  /// omega * s mod Z^d.
  static TorusPoint on_line(long double omega, const SuspensionParams& s);
  int size() const { return static_cast<int>(xi.size()); }
  std::vector<long double> values() const;
};

/// x -> S^T x mod Z^d; exact on the 128-bit lattice.
TorusPoint advance(const IntMatrix& s, const TorusPoint& x);

/// Entry (b,c): sum over positions j of c in z(b) of exp(-2 pi i sum_{k<j} xi_{z(b)_k}).
CMatrix cocycle_matrix(const Substitution& z, const TorusPoint& xi);

/// Product M(S^T^{n-1} xi) ... M(xi) as normalized * exp(log_scale).
struct CocycleProduct {
  CMatrix normalized;   // max-abs entry 1, or zero when degenerate
  long double log_scale = 0;
  int depth = 0;
  bool degenerate() const;
  CMatrix reconstruct() const;
  /// log of the Frobenius norm of the full product (-inf when degenerate).
  long double log_norm() const;
};

/// Full-torus product. Requires det(S) != 0; for singular S use the line form.
CocycleProduct cocycle_product(const Substitution& z, const TorusPoint& xi, int n);
/// Product along the line xi = omega * s (always available).
CocycleProduct cocycle_product_on_line(const Substitution& z, long double omega, const SuspensionParams& s, int n);
/// Same recursion without the determinant gate; used internally and by tests.
CocycleProduct cocycle_product_unchecked(const Substitution& z, const IntMatrix& s, TorusPoint xi, int n);

/// Sum_j [v_j = a] exp(-2 pi i omega L_j), L_j = |v_0 ... v_{j-1}|_s.
std::complex<double> twisted_sum(const Word& v, Letter a, long double omega, const SuspensionParams& s);
/// Weighted version: sum_j phi(v_j) exp(-2 pi i omega L_j).
std::complex<double> twisted_sum(const Word& v, const std::vector<std::complex<double>>& phi, long double omega,
                                 const SuspensionParams& s);

/// Pi_n^{(k)}(omega) = M_zeta((S^T)^k omega s, n). Entry (b,a) = twisted sum of a over z^n(b) at k=0.
CocycleProduct pi_matrix(const Substitution& z, long double omega, int n, int k, const SuspensionParams& s);

/// Uniform closed-open partition of [lo, hi).
struct FrequencyGrid {
  double lo = 0, hi = 1;
  std::size_t points = 1024;
  double omega(std::size_t i) const { return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points); }
  double step() const { return (hi - lo) / static_cast<double>(points); }
};

struct DensityGrid {
  FrequencyGrid grid;
  int level = 0;
  std::string label;                 // "level-n approximant" and the like
  std::vector<CMatrix> matrices;     // matrix-valued densities
  std::vector<double> scalar;        // scalar densities
  bool is_scalar() const { return matrices.empty(); }
  std::vector<std::string> tokens;   // for matrix column names
  void write_csv(std::ostream& out) const;
  /// Riemann sum of scalar values (or entry (a,b) of matrices) over the grid.
  double integral() const;
  std::complex<double> integral(int a, int b) const;
};

/// theta^{-n} conj(Pi_n^* Pi_n) / (<r,1><1,l>) per grid point.
DensityGrid riesz_density(const Substitution& z, int n, const FrequencyGrid& grid, const SuspensionParams& s,
                          int threads = 1);
/// 2^{-N} |prod_{n<N} (1 - exp(-2 pi i omega 2^n))|^2.
DensityGrid tm_scalar_riesz(int N, const FrequencyGrid& grid);
/// phi^T D conj(phi) per grid point.
DensityGrid contract(const DensityGrid& m, const std::vector<std::complex<double>>& phi);

struct TestFunction {
  enum class Kind { Simple, LevelIndicator };
  Kind kind = Kind::Simple;
  std::vector<std::complex<double>> b;  // weight per letter
  int level = 0;                        // for LevelIndicator: constant b_a on level-k supertiles

  static TestFunction simple(std::vector<std::complex<double>> b) { return {Kind::Simple, std::move(b), 0}; }
  static TestFunction indicator(int d, Letter a, int level = 0);
  bool is_zero() const;
};

/// int_0^len exp(-2 pi i omega t) dt, stable near omega = 0.
std::complex<double> segment_transform(long double omega, long double len);
/// psi_j hat(omega) = b_j * int_0^{len_j} exp(-2 pi i omega t) dt, len_j the (super)tile length.
CVector function_transform(const Substitution& z, const TestFunction& f, const SuspensionParams& s, long double omega);

/// Flow spectral density approximant for f at level n.
DensityGrid spectral_density_for_function(const Substitution& z, const SuspensionParams& s, const TestFunction& f,
                                          int n, const FrequencyGrid& grid, int threads = 1);

/// Z-action statistics on the fixed-point prefix with cylindrical weights b.
double gn_statistic(const Substitution& z, const std::vector<std::complex<double>>& b, double omega, std::size_t N);
double ball_bound(const Substitution& z, const std::vector<std::complex<double>>& b, double omega, double r);
struct PointMassEstimate {
  double value = 0;                // N^{-1} G_N at N
  std::vector<std::size_t> n;      // N, 2N, 4N
  std::vector<double> sequence;    // the estimate at each
  double spread = 0;               // max - min over the sequence
};
PointMassEstimate point_mass_estimate(const Substitution& z, const std::vector<std::complex<double>>& b, double omega,
                                      std::size_t N);

/// (sin(pi w)/(pi w))^2, 1 at w = 0.
double sinc_squared(double omega);
DensityGrid suspension_conversion(const DensityGrid& sigma);

struct DiffractionResult {
  std::vector<std::pair<double, double>> autocorrelation;  // (distance >= 0, weight), cut off at max_distance
  double mass_at_zero = 0;
  std::size_t points = 0;
  DensityGrid diffraction;
};
/// Lambda_a = left endpoints of a-tiles in [0, R] of the fixed-point tiling.
DiffractionResult diffraction_autocorrelation(const Substitution& z, const SuspensionParams& s, Letter a, double R,
                                              const FrequencyGrid& grid, double max_distance = 0, int threads = 1);

/// max over the grid of |sum_j P((w+j)/q) - q| for a bijective two-letter rule.
double partition_identity_check(const Substitution& z, const FrequencyGrid& grid);

/// int_0^R exp(-2 pi i omega t) f(h_t(x0)) dt along the fixed-point tiling.
std::complex<double> flow_twisted_integral(const Substitution& z, const SuspensionParams& s, const TestFunction& f,
                                           long double omega, long double R);

}  // namespace subspec
