#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "subspec/classification.hpp"
#include "subspec/cocycle.hpp"

namespace subspec {

struct PointwiseExponent {
  // value[n-1] = (1/n) log ||M(xi,n)||, or (1/n) log(||M(xi,n) z|| / ||z||); -inf when degenerate.
  // Norms are weighted by the PF vector of S^T so that every value is <= log theta.
  std::vector<long double> value;
  long double proxy = 0;           // max over the last 20% of depths
  std::optional<int> degenerate_from;
};
/// Full-torus point; requires det(S) != 0.
PointwiseExponent pointwise_exponent(const Substitution& z, const TorusPoint& xi, int n_max,
                                     const CVector* vec = nullptr);
/// Along xi = omega * s.
PointwiseExponent pointwise_exponent_on_line(const Substitution& z, long double omega, const SuspensionParams& s,
                                             int n_max, const CVector* vec = nullptr);

struct ExponentEstimate {
  std::vector<double> estimate;     // index k-1
  std::vector<double> std_error;
  std::vector<double> running_min;  // min_{j<=k} estimate_j
  std::size_t samples = 0;          // requested
  std::size_t used = 0;             // after excluding degenerate samples
  std::size_t degenerate = 0;
  std::uint64_t seed = 0;
  double value = 0;                 // min over k
  double value_se = 0;              // SE at the minimizing depth
  int argmin = 0;                   // k attaining the min
  double log_theta = 0;
};

/// Seeded quasi-Monte Carlo estimate of the top exponent via (1/k) E log ||M_{z^k}(xi)||,
/// PF-weighted operator norm.
ExponentEstimate global_exponent(const Substitution& z, int K, std::size_t samples, std::uint64_t seed,
                                 int threads = 1);

/// Sample points: Halton in bases 2,3,5,... plus a seeded rotation; the low bits
/// below double resolution are filled from a per-index hash so orbits stay generic.
TorusPoint qmc_point(int d, std::size_t index, std::uint64_t seed);

CriterionResult singularity_verdict_irreducible(const Substitution& z, const ExponentEstimate& est);

struct DimensionReport {
  double omega = 0;
  std::optional<double> exponent;  // proxy or exact log|theta_k|
  std::optional<double> dimension;
  bool at_least_two = false;
  std::string branch;  // "formula", ">=2", "point-mass", "projection unresolved"
  int k = 0;           // dimension_at_zero: index of the first nonzero projection group
  std::string note;
};
DimensionReport local_dimension(const Substitution& z, const SuspensionParams& s, const TestFunction& f,
                                long double omega, int n_max);
DimensionReport dimension_at_zero(const Substitution& z, const SuspensionParams& s, const TestFunction& f);

/// prod_{k<n} (1 - c1 ||omega |z^k(v)|_s||^2); a diagnostic, not a certified bound.
double return_word_bound(const Substitution& z, const SuspensionParams& s, const Word& v, long double omega, int n,
                         double c1);
/// ||omega |z^k(v)|_s|| for k = 0..K-1, exact populations.
std::vector<long double> return_word_distances(const Substitution& z, const SuspensionParams& s, const Word& v,
                                               long double omega, int K);

struct EigenvalueScanResult {
  std::vector<double> omega;
  std::vector<double> max_distance_last5;
  std::vector<bool> candidate;
  int K = 0;
  double epsilon = 0.02;
  std::vector<Word> words;  // return words of the fixed point
  void write_csv(std::ostream& out) const;
  std::vector<double> candidates() const;
};
EigenvalueScanResult eigenvalue_scan(const Substitution& z, const SuspensionParams& s, const FrequencyGrid& grid,
                                     int K = 30, double epsilon = 0.02, int threads = 1);
/// Scan at explicit frequencies.
EigenvalueScanResult eigenvalue_scan_at(const Substitution& z, const SuspensionParams& s,
                                        const std::vector<double>& omegas, int K = 30, double epsilon = 0.02);

struct UpperBoundCheck {
  double max_excess = 0;  // max (1/n) log ||M(xi,n)|| - log theta
  std::size_t trials = 0;
  std::size_t degenerate = 0;
  bool on_line = false;
};
UpperBoundCheck chi_upper_bound_check(const Substitution& z, std::size_t trials, std::uint64_t seed, int n = 200,
                                      int threads = 1);

}  // namespace subspec
