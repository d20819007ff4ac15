#include "subspec/substitution.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "subspec/errors.hpp"

namespace subspec {

Substitution::Substitution(std::vector<std::string> tokens, std::vector<Word> rules)
    : tokens_(std::move(tokens)), rules_(std::move(rules)) {
  const auto d = rules_.size();
  if (d == 0) throw InputError("substitution has an empty alphabet");
  if (tokens_.size() != d) throw InputError("token list and rule list differ in size");
  if (d > 0xFFFF) throw InputError("alphabet too large");
  std::set<std::string> seen;
  for (const auto& t : tokens_)
    if (!seen.insert(t).second) throw InputError("duplicate alphabet token '" + t + "'");
  for (std::size_t b = 0; b < d; ++b) {
    if (rules_[b].empty()) throw InputError("empty image for letter '" + tokens_[b] + "'");
    for (Letter c : rules_[b])
      if (c >= d) throw InputError("rule for '" + tokens_[b] + "' uses a letter outside the alphabet");
  }
}

std::string Substitution::format(const Word& w) const {
  const bool compact =
      std::all_of(tokens_.begin(), tokens_.end(), [](const std::string& t) { return t.size() == 1; });
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!compact && i > 0) out += ' ';
    out += tokens_[w[i]];
  }
  return out;
}

std::string Substitution::to_dsl() const {
  std::string out;
  for (int b = 0; b < size(); ++b) out += tokens_[b] + " -> " + format(rules_[b]) + "\n";
  return out;
}

namespace {

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

Word Substitution::parse_word(const std::string& text) const {
  std::map<std::string, Letter> index;
  for (std::size_t i = 0; i < tokens_.size(); ++i) index[tokens_[i]] = static_cast<Letter>(i);
  const bool compact =
      std::all_of(tokens_.begin(), tokens_.end(), [](const std::string& t) { return t.size() == 1; });
  Word w;
  for (const auto& piece : split_ws(text)) {
    if (index.count(piece)) {
      w.push_back(index[piece]);
      continue;
    }
    if (!compact) throw InputError("unknown symbol '" + piece + "'");
    for (char ch : piece) {
      auto it = index.find(std::string(1, ch));
      if (it == index.end()) throw InputError("unknown symbol '" + std::string(1, ch) + "'");
      w.push_back(it->second);
    }
  }
  return w;
}

Substitution parse_substitution(const std::string& text) {
  struct RawRule {
    std::size_t line;
    std::string lhs;
    std::vector<std::string> rhs;
  };
  std::vector<RawRule> raw;
  std::vector<std::string> declared;
  std::size_t declared_line = 0;

  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto arrow = line.find("->");
    if (arrow == std::string::npos) {
      const auto eq = line.find('=');
      if (eq != std::string::npos && trim(line.substr(0, eq)) == "alphabet") {
        if (declared_line) throw ParseError(lineno, "alphabet declared twice");
        declared = split_ws(line.substr(eq + 1));
        declared_line = lineno;
        if (declared.empty()) throw ParseError(lineno, "empty alphabet declaration");
        std::set<std::string> uniq(declared.begin(), declared.end());
        if (uniq.size() != declared.size()) throw ParseError(lineno, "duplicate token in alphabet");
        continue;
      }
      throw ParseError(lineno, "expected 'tok -> tok tok ...' or 'alphabet = ...'");
    }
    const auto lhs = split_ws(line.substr(0, arrow));
    if (lhs.size() != 1) throw ParseError(lineno, "left-hand side must be exactly one token");
    auto rhs = split_ws(line.substr(arrow + 2));
    if (rhs.empty()) throw ParseError(lineno, "empty rule word for '" + lhs[0] + "'");
    raw.push_back({lineno, lhs[0], std::move(rhs)});
  }
  if (raw.empty()) throw ParseError(lineno == 0 ? 1 : lineno, "no rules found");

  // Alphabet: declared, else first appearance of left-hand tokens.
  std::vector<std::string> tokens = declared;
  if (tokens.empty())
    for (const auto& r : raw)
      if (std::find(tokens.begin(), tokens.end(), r.lhs) == tokens.end()) tokens.push_back(r.lhs);
  std::map<std::string, Letter> index;
  for (std::size_t i = 0; i < tokens.size(); ++i) index[tokens[i]] = static_cast<Letter>(i);
  const bool compact =
      std::all_of(tokens.begin(), tokens.end(), [](const std::string& t) { return t.size() == 1; });
  // Without a declaration, unspaced right-hand tokens may still introduce new
  // letters; those are caught as unknown below since every letter needs a rule.

  std::vector<std::optional<Word>> rules(tokens.size());
  for (const auto& r : raw) {
    auto it = index.find(r.lhs);
    if (it == index.end()) throw ParseError(r.line, "unknown symbol '" + r.lhs + "'");
    if (rules[it->second]) throw ParseError(r.line, "duplicate rule for '" + r.lhs + "'");
    Word w;
    for (const auto& piece : r.rhs) {
      if (auto jt = index.find(piece); jt != index.end()) {
        w.push_back(jt->second);
        continue;
      }
      if (!compact || piece.size() == 1) throw ParseError(r.line, "unknown symbol '" + piece + "'");
      for (char ch : piece) {
        auto kt = index.find(std::string(1, ch));
        if (kt == index.end()) throw ParseError(r.line, "unknown symbol '" + std::string(1, ch) + "'");
        w.push_back(kt->second);
      }
    }
    rules[it->second] = std::move(w);
  }
  std::vector<Word> out;
  for (std::size_t b = 0; b < tokens.size(); ++b) {
    if (!rules[b]) throw ParseError(declared_line ? declared_line : lineno, "no rule for symbol '" + tokens[b] + "'");
    out.push_back(std::move(*rules[b]));
  }
  return Substitution(std::move(tokens), std::move(out));
}

Word apply(const Substitution& z, const Word& v, std::size_t cap) {
  std::size_t len = 0;
  for (Letter c : v) {
    len += z.rule(c).size();
    if (len > cap) throw LengthCapExceeded("word length exceeds cap of " + std::to_string(cap) + " symbols");
  }
  Word out;
  out.reserve(len);
  for (Letter c : v) out.insert(out.end(), z.rule(c).begin(), z.rule(c).end());
  return out;
}

Word apply_power(const Substitution& z, const Word& v, int n, std::size_t cap) {
  if (n < 0) throw PreconditionError("power must be non-negative");
  Word w = v;
  for (int i = 0; i < n; ++i) w = apply(z, w, cap);
  return w;
}

Substitution power(const Substitution& z, int n, std::size_t cap) {
  if (n < 1) throw PreconditionError("power requires n >= 1");
  std::vector<Word> rules;
  for (int b = 0; b < z.size(); ++b) rules.push_back(apply_power(z, Word{static_cast<Letter>(b)}, n, cap));
  return Substitution(z.tokens(), std::move(rules));
}

Substitution compose(const Substitution& outer, const Substitution& inner, std::size_t cap) {
  if (outer.size() != inner.size()) throw PreconditionError("composition needs a shared alphabet");
  std::vector<Word> rules;
  for (int b = 0; b < inner.size(); ++b) rules.push_back(apply(outer, inner.rule(b), cap));
  return Substitution(outer.tokens(), std::move(rules));
}

IntMatrix substitution_matrix(const Substitution& z) {
  const int d = z.size();
  IntMatrix s = IntMatrix::Zero(d, d);
  for (int j = 0; j < d; ++j)
    for (Letter i : z.rule(j)) ++s(i, j);
  return s;
}

PrimitivityResult is_primitive(const Substitution& z) {
  const int d = z.size();
  using BoolMat = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;
  const IntMatrix s = substitution_matrix(z);
  BoolMat a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = s(i, j) > 0;
  BoolMat p = a;
  const int bound = d * d - 2 * d + 2;
  for (int n = 1; n <= bound; ++n) {
    if (p.all()) return {true, n};
    BoolMat next = BoolMat::Constant(d, d, false);
    for (int i = 0; i < d; ++i)
      for (int k = 0; k < d; ++k)
        if (p(i, k))
          for (int j = 0; j < d; ++j) next(i, j) = next(i, j) || a(k, j);
    p = next;
  }
  return {false, 0};
}

namespace {

using RealMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

RealMatrix to_real(const IntMatrix& m) { return m.cast<long double>(); }

// Dominant eigenvector of a primitive non-negative matrix.
RealVector dominant_vector(const RealMatrix& a, long double& theta) {
  const int d = static_cast<int>(a.rows());
  RealVector v = RealVector::Constant(d, 1.0L / d);
  const RealMatrix shifted = a + RealMatrix::Identity(d, d);
  long double lambda = 0;
  for (int it = 0; it < 1'000'000; ++it) {
    RealVector w = shifted * v;
    const long double norm = w.sum();
    w /= norm;
    const long double change = (w - v).cwiseAbs().maxCoeff();
    v = w;
    lambda = norm - 1.0L;
    if (change < 1e-15L) break;
  }
  // Inverse iteration polish at the converged shift.
  for (int it = 0; it < 3; ++it) {
    const long double rq = (v.dot(a * v)) / v.dot(v);
    const long double mu = rq * (1.0L + 1e-12L);
    Eigen::PartialPivLU<RealMatrix> lu(a - mu * RealMatrix::Identity(d, d));
    RealVector w = lu.solve(v);
    if (!w.allFinite() || w.sum() == 0) break;
    w /= w.sum();
    v = w;
    lambda = (v.dot(a * v)) / v.dot(v);
  }
  theta = lambda;
  return v;
}

}  // namespace

PerronData perron_data(const Substitution& z) {
  if (!is_primitive(z).primitive) throw PreconditionError("Perron-Frobenius data requires a primitive substitution");
  const RealMatrix s = to_real(substitution_matrix(z));
  PerronData pd;
  long double th_r = 0, th_l = 0;
  RealVector r = dominant_vector(s, th_r);
  RealVector l = dominant_vector(s.transpose(), th_l);
  pd.theta = (th_r + th_l) / 2;
  r /= r.sum();
  l /= r.dot(l);
  pd.right = r;
  pd.left = l;
  pd.frequency = r;
  pd.right_residual = (s * r - pd.theta * r).cwiseAbs().maxCoeff();
  pd.left_residual = (s.transpose() * l - pd.theta * l).cwiseAbs().maxCoeff();
  if (pd.right_residual > 1e-12L * pd.theta || pd.left_residual > 1e-12L * pd.theta * l.cwiseAbs().maxCoeff())
    throw NumericalError("Perron-Frobenius iteration did not reach the residual tolerance");
  return pd;
}

std::optional<int> fixed_point_power(const Substitution& z, Letter a) {
  const int d = z.size();
  const IntMatrix s = substitution_matrix(z);
  Letter first = a;
  for (int p = 1; p <= d; ++p) {
    first = z.rule(first).front();
    if (first != a) continue;
    // The fixed point must be infinite: some power of z^p stretches a.
    IntMatrix sp = IntMatrix::Identity(d, d);
    for (int i = 0; i < p; ++i) sp = checked_multiply(sp, s);
    IntMatrix acc = sp;
    for (int j = 1; j <= d; ++j) {
      if (acc.col(a).sum() > 1) return p;
      acc = checked_multiply(acc, sp);
    }
    return std::nullopt;
  }
  return std::nullopt;
}

Word fixed_point_prefix(const Substitution& z, Letter a, std::size_t n, std::size_t cap) {
  if (a >= z.size()) throw PreconditionError("letter outside the alphabet");
  if (n > cap) throw LengthCapExceeded("requested prefix exceeds cap of " + std::to_string(cap) + " symbols");
  const auto p = fixed_point_power(z, a);
  if (!p)
    throw PreconditionError("no power z^p with p = 1.." + std::to_string(z.size()) + " maps '" + z.token(a) +
                            "' to a growing word beginning with '" + z.token(a) + "'");
  const Substitution zp = power(z, *p, cap);
  Word w{a};
  while (w.size() < n) {
    // w is a prefix of zp(w); expand only what is needed.
    Word next;
    next.reserve(std::min(n, w.size() * 4 + 4));
    for (Letter c : w) {
      const Word& img = zp.rule(c);
      next.insert(next.end(), img.begin(), img.end());
      if (next.size() >= n) break;
    }
    if (next.size() <= w.size()) throw PreconditionError("fixed point does not grow");
    w = std::move(next);
  }
  w.resize(n);
  return w;
}

FixedPointSeed default_fixed_point(const Substitution& z) {
  for (int a = 0; a < z.size(); ++a)
    if (auto p = fixed_point_power(z, static_cast<Letter>(a))) return {*p, static_cast<Letter>(a)};
  throw PreconditionError("no letter admits a one-sided fixed point in powers 1.." + std::to_string(z.size()));
}

const char* to_string(Aperiodicity a) {
  switch (a) {
    case Aperiodicity::Periodic:
      return "periodic";
    case Aperiodicity::Aperiodic:
      return "aperiodic";
    case Aperiodicity::Unknown:
      return "unknown";
  }
  return "unknown";
}

namespace {

bool has_two_neighborhoods(const Word& u, int d) {
  std::vector<std::set<std::pair<Letter, Letter>>> nb(d);
  for (std::size_t i = 1; i + 1 < u.size(); ++i) {
    nb[u[i]].insert({u[i - 1], u[i + 1]});
    if (nb[u[i]].size() >= 2) return true;
  }
  return false;
}

std::size_t smallest_period(const Word& u) {
  // KMP failure function: the shortest period is n - border(n).
  const std::size_t n = u.size();
  std::vector<std::size_t> fail(n + 1, 0);
  std::size_t k = 0;
  for (std::size_t i = 1; i < n; ++i) {
    while (k > 0 && u[i] != u[k]) k = fail[k];
    if (u[i] == u[k]) ++k;
    fail[i + 1] = k;
  }
  return n - fail[n];
}

}  // namespace

AperiodicityResult aperiodicity_verdict(const Substitution& z, const AperiodicityConfig& cfg) {
  AperiodicityResult res;
  const int d = z.size();
  if (!is_primitive(z).primitive) throw PreconditionError("aperiodicity test requires a primitive substitution");
  const bool all_unit = std::all_of(z.rules().begin(), z.rules().end(), [](const Word& w) { return w.size() == 1; });
  if (all_unit) {
    res.verdict = Aperiodicity::Periodic;
    res.reason = "every image has length 1; the subshift is finite";
    res.tests_run.push_back("unit-length images");
    return res;
  }
  const std::size_t q = z.rule(0).size();
  const bool constant = std::all_of(z.rules().begin(), z.rules().end(), [&](const Word& w) { return w.size() == q; });
  if (constant) {
    const auto seed = default_fixed_point(z);
    std::size_t len = cfg.prefix_factor * q * d * d;
    for (int attempt = 0; attempt < 2; ++attempt, len *= 2) {
      const Word u = fixed_point_prefix(z, seed.letter, len);
      res.tests_run.push_back("neighborhood scan on prefix of length " + std::to_string(len));
      if (has_two_neighborhoods(u, d)) {
        res.verdict = Aperiodicity::Aperiodic;
        res.reason = "some letter occurs with two distinct neighborhoods";
        return res;
      }
      if (attempt == 1) {
        res.verdict = Aperiodicity::Periodic;
        res.period = smallest_period(u);
        res.reason = "every letter has a single neighborhood; prefix has period " + std::to_string(*res.period);
        res.tests_run.push_back("smallest period of scanned prefix");
      }
    }
    return res;
  }
  // Non-constant length: irrational PF eigenvalue suffices.
  res.tests_run.push_back("rationality of the Perron-Frobenius eigenvalue");
  const IntMatrix s = substitution_matrix(z);
  const IntPoly cp = characteristic_polynomial(s);
  const long double theta = perron_data(z).theta;
  const long double n = std::round(theta);
  const bool rational = std::abs(theta - n) < 1e-6L && cp.eval(n) == 0.0L &&
                        cp.divisible_by(IntPoly({-static_cast<std::int64_t>(n), 1}));
  if (rational) {
    res.verdict = Aperiodicity::Unknown;
    res.reason = "non-constant length with integer Perron-Frobenius eigenvalue; no decision procedure applies";
  } else {
    res.verdict = Aperiodicity::Aperiodic;
    res.reason = "Perron-Frobenius eigenvalue is irrational";
  }
  return res;
}

std::vector<Word> return_words(const Substitution& z, std::size_t max_len, const ReturnWordConfig& cfg) {
  if (max_len == 0) return {};
  const auto seed = default_fixed_point(z);
  std::size_t len = cfg.prefix_length;
  for (int attempt = 0; attempt < 2; ++attempt, len *= 2) {
    const Word u = fixed_point_prefix(z, seed.letter, len);
    std::set<Word> found;
    std::vector<std::ptrdiff_t> last(z.size(), -1);
    for (std::size_t i = 0; i < u.size(); ++i) {
      const Letter c = u[i];
      if (last[c] >= 0 && i - last[c] <= max_len) found.insert(Word(u.begin() + last[c], u.begin() + i));
      last[c] = static_cast<std::ptrdiff_t>(i);
    }
    if (!found.empty()) return {found.begin(), found.end()};
  }
  return {};
}

namespace {

bool contains(const Word& hay, const Word& needle) {
  return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

}  // namespace

GoodReturnWords good_return_words(const Substitution& z, std::size_t max_len, const ReturnWordConfig& cfg) {
  GoodReturnWords out;
  const auto all = return_words(z, max_len, cfg);
  if (all.empty()) return out;
  for (int k = 1; k <= cfg.max_good_power; ++k) {
    Substitution zk = z;
    try {
      zk = power(z, k);
    } catch (const LengthCapExceeded&) {
      break;
    }
    for (const Word& v : all) {
      Word vc = v;
      vc.push_back(v.front());
      bool good = true;
      for (int b = 0; b < z.size() && good; ++b) good = contains(zk.rule(b), vc);
      if (good) out.words.push_back(v);
    }
    if (!out.words.empty()) {
      out.power = k;
      return out;
    }
  }
  return out;
}

IntVector population_vector(const Word& v, int d) {
  IntVector p = IntVector::Zero(d);
  for (Letter c : v) ++p(c);
  return p;
}

SuspensionParams SuspensionParams::unit(int d) { return {SuspensionMode::Unit, RealVector::Ones(d)}; }

SuspensionParams SuspensionParams::self_similar(const Substitution& z) {
  const auto pd = perron_data(z);
  RealVector s = pd.left;
  s /= s.minCoeff();
  return {SuspensionMode::SelfSimilar, s};
}

SuspensionParams SuspensionParams::explicit_heights(const std::vector<long double>& s) {
  RealVector h(static_cast<Eigen::Index>(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(s[i] > 0) || !std::isfinite(s[i])) throw PreconditionError("suspension heights must be positive and finite");
    h(static_cast<Eigen::Index>(i)) = s[i];
  }
  if (s.empty()) throw PreconditionError("empty height vector");
  return {SuspensionMode::Explicit, h};
}

long double tiling_length(const Word& v, const SuspensionParams& s) {
  long double acc = 0;
  for (Letter c : v) acc += s.heights(c);
  return acc;
}

long double tiling_length(const IntVector& population, const SuspensionParams& s) {
  long double acc = 0;
  for (Eigen::Index i = 0; i < population.size(); ++i) acc += static_cast<long double>(population(i)) * s.heights(i);
  return acc;
}

}  // namespace subspec
