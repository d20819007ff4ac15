#pragma once

#include <complex>
#include <cstdint>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "subspec/intpoly.hpp"
#include "subspec/substitution.hpp"

namespace subspec {

enum class Verdict { Holds, Fails, Inconclusive, NotApplicable };
const char* to_string(Verdict v);

// The statement a verdict rests on. Tags are stable strings used in reports.
enum class Theorem {
  Primitivity,
  PansiotNeighborhoods,
  IrrationalPfEigenvalue,
  DekkingHeight,
  DekkingCoincidence,
  BijectiveStructure,
  SqrtQCriterion,
  BijectiveTwoLetter,
  SelfSimilarPisotWeakMixing,
  IrreduciblePisot,
  PisotConjecture,
  LyapunovHalfLogTheta,
  LyapunovUpperBound,
  ClarkSadunReturnWords,
  LocalDimensionLyapunov,
  DimensionAtZero,
  WienerPointMass,
};
const char* theorem_tag(Theorem t);
std::vector<std::string> all_theorem_tags();

struct CriterionResult {
  std::string id;
  Verdict verdict = Verdict::Inconclusive;
  Theorem theorem = Theorem::Primitivity;
  std::string statement;  // e.g. "singular maximal spectral type"
  nlohmann::json evidence = nlohmann::json::object();
};
nlohmann::json to_json(const CriterionResult& c);

std::optional<int> constant_length(const Substitution& z);

struct HeightConfig {
  int window = 64;                   // occurrences with unchanged gcd
  std::size_t max_prefix = 4'000'000;
};
struct HeightResult {
  int q = 0;
  std::int64_t g0 = 0;
  std::int64_t h = 1;
  std::size_t position = 0;  // ell: the gcd is taken over returns to u[ell]
  bool confirmed = false;    // false: prefix exhausted before the window filled
};
HeightResult height(const Substitution& z, std::size_t ell = 0, const HeightConfig& cfg = {});

using ColumnMap = std::vector<Letter>;
struct ColumnSemigroup {
  std::vector<ColumnMap> generators;
  std::vector<ColumnMap> closure;   // in order of discovery (by composition length)
  std::vector<int> length;          // shortest generator-word length per closure element
};
/// f_i(a) = z(a)_i.
std::vector<ColumnMap> column_maps(const Substitution& z);
ColumnSemigroup close_semigroup(const std::vector<ColumnMap>& generators);
ColumnSemigroup column_semigroup(const Substitution& z);

struct CoincidenceResult {
  bool coincidence = false;
  int k = 0;                  // shortest power of z with a constant column
  std::size_t closure_size = 0;
};
CoincidenceResult dekking_coincidence(const Substitution& z);

enum class Bijectivity { NotBijective, Bijective, AbelianBijective };
const char* to_string(Bijectivity b);
struct BijectivityResult {
  Bijectivity kind = Bijectivity::NotBijective;
  std::vector<ColumnMap> columns;
};
BijectivityResult bijectivity(const Substitution& z);

struct PisotReport {
  IntPoly charpoly;
  std::optional<bool> irreducible;  // nullopt past the exact factorization bound
  std::vector<IntPoly> factors;
  IntPoly pf_minimal_polynomial;
  long double theta = 0;
  std::vector<std::complex<double>> eigenvalues;  // sorted by modulus, descending
  std::vector<std::complex<double>> pf_conjugates;
  bool pf_is_pisot = false;
  bool irreducible_pisot = false;
  std::vector<std::string> flags;
  std::int64_t trace = 0;
  std::int64_t det = 0;
};
PisotReport pisot_report(const Substitution& z);

CriterionResult weak_mixing_selfsimilar(const Substitution& z);
CriterionResult sqrtq_singularity(const Substitution& z);
CriterionResult bijective_two_letter_singularity(const Substitution& z);

/// Coefficients of F(w) = sum_k (-1)^{u_k} e^{-2 pi i k w}, u = z(0), for a
/// bijective two-letter rule. P(w) = |F(w)|^2 / q.
std::vector<int> two_letter_signs(const Substitution& z);
double two_letter_polynomial(const std::vector<int>& signs, double omega);

struct SpectrumVerdict {
  std::vector<CriterionResult> criteria;
  std::string headline;
  std::optional<std::string> eigenvalue_group;
};
SpectrumVerdict spectrum_summary(const Substitution& z);

struct PowerDistances {
  std::vector<long double> distance;  // index k = 0..K
  bool exact = false;
};
/// ||theta^k x|| for x = sum_i x[i] theta^i in Z[theta], k = 0..K. Uses the
/// integrality of traces: theta^k x is congruent mod Z to minus the sum over
/// the other conjugates, which carries no cancellation.
PowerDistances pisot_power_distances(const IntPoly& minpoly, const std::vector<std::int64_t>& x, int K);
/// Plain floating evaluation for real x; always flagged inexact.
PowerDistances power_distances_real(long double theta, long double x, int K);

struct BernoulliValue {
  std::complex<double> value;
  double tail_bound = 0;
};
BernoulliValue bernoulli_fourier(double lambda, double p, double xi, int n_terms);

}  // namespace subspec
