#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "subspec/intpoly.hpp"

namespace subspec {

using Letter = std::uint16_t;
using Word = std::vector<Letter>;
using RealVector = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

inline constexpr std::size_t kDefaultLengthCap = 10'000'000;

class Substitution {
 public:
  Substitution(std::vector<std::string> tokens, std::vector<Word> rules);

  int size() const { return static_cast<int>(rules_.size()); }
  const Word& rule(Letter b) const { return rules_[b]; }
  const std::vector<Word>& rules() const { return rules_; }
  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::string& token(Letter b) const { return tokens_[b]; }

  /// Word with one letter per token, e.g. "0110". Tokens are joined by spaces
  /// unless every token is a single character.
  std::string format(const Word& w) const;
  /// Rule text in the input DSL: one "tok -> toks" line per letter.
  std::string to_dsl() const;
  Word parse_word(const std::string& text) const;

  bool operator==(const Substitution& o) const = default;

 private:
  std::vector<std::string> tokens_;
  std::vector<Word> rules_;
};

/// Rule DSL: optional `alphabet = a b c`, lines `tok -> tok tok ...`, `#` comments.
Substitution parse_substitution(const std::string& text);

Word apply(const Substitution& z, const Word& v, std::size_t cap = kDefaultLengthCap);
Word apply_power(const Substitution& z, const Word& v, int n, std::size_t cap = kDefaultLengthCap);
Substitution power(const Substitution& z, int n, std::size_t cap = kDefaultLengthCap);
/// (outer o inner)(b) = outer(inner(b)).
Substitution compose(const Substitution& outer, const Substitution& inner,
                     std::size_t cap = kDefaultLengthCap);

/// Entry (i,j) counts letter i in the image of letter j.
IntMatrix substitution_matrix(const Substitution& z);

struct PrimitivityResult {
  bool primitive = false;
  int exponent = 0;  // smallest n with S^n > 0, when primitive
};
PrimitivityResult is_primitive(const Substitution& z);

struct PerronData {
  long double theta = 0;
  RealVector right;      // S r = theta r
  RealVector left;       // S^T l = theta l, <r,l> = 1
  RealVector frequency;  // r / sum(r)
  long double right_residual = 0;
  long double left_residual = 0;
};
PerronData perron_data(const Substitution& z);

/// Fixed point of a power of z beginning with `a`; the power is found internally.
struct FixedPointSeed {
  int power = 0;
  Letter letter = 0;
};
/// Search powers 1..d for the smallest p such that z^p(a) begins with a and grows.
std::optional<int> fixed_point_power(const Substitution& z, Letter a);
Word fixed_point_prefix(const Substitution& z, Letter a, std::size_t n,
                        std::size_t cap = kDefaultLengthCap);
/// First letter admitting a fixed point, with its power.
FixedPointSeed default_fixed_point(const Substitution& z);

enum class Aperiodicity { Periodic, Aperiodic, Unknown };
struct AperiodicityResult {
  Aperiodicity verdict = Aperiodicity::Unknown;
  std::string reason;
  std::vector<std::string> tests_run;
  std::optional<std::size_t> period;  // smallest period of the scanned prefix, when periodic
};
struct AperiodicityConfig {
  std::size_t prefix_factor = 16;  // prefix length = factor * q * d^2
};
AperiodicityResult aperiodicity_verdict(const Substitution& z, const AperiodicityConfig& cfg = {});
const char* to_string(Aperiodicity a);

struct ReturnWordConfig {
  std::size_t prefix_length = 100'000;
  int max_good_power = 8;
};
/// Words v with vc in the fixed point, c = v[0], and no c inside v after position 0.
std::vector<Word> return_words(const Substitution& z, std::size_t max_len,
                               const ReturnWordConfig& cfg = {});
struct GoodReturnWords {
  int power = 0;  // k such that vc occurs in every z^k(b)
  std::vector<Word> words;
};
GoodReturnWords good_return_words(const Substitution& z, std::size_t max_len,
                                  const ReturnWordConfig& cfg = {});

IntVector population_vector(const Word& v, int d);

enum class SuspensionMode { Unit, SelfSimilar, Explicit };
struct SuspensionParams {
  SuspensionMode mode = SuspensionMode::Unit;
  RealVector heights;

  static SuspensionParams unit(int d);
  /// PF eigenvector of S^T, scaled so that the smallest entry is 1.
  static SuspensionParams self_similar(const Substitution& z);
  static SuspensionParams explicit_heights(const std::vector<long double>& s);
  int size() const { return static_cast<int>(heights.size()); }
};
long double tiling_length(const Word& v, const SuspensionParams& s);
long double tiling_length(const IntVector& population, const SuspensionParams& s);

}  // namespace subspec
