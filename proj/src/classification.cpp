#include "subspec/classification.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <set>

#include "subspec/errors.hpp"

namespace subspec {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds:
      return "holds";
    case Verdict::Fails:
      return "fails";
    case Verdict::Inconclusive:
      return "inconclusive";
    case Verdict::NotApplicable:
      return "not-applicable";
  }
  return "inconclusive";
}

const char* theorem_tag(Theorem t) {
  switch (t) {
    case Theorem::Primitivity:
      return "primitivity-wielandt";
    case Theorem::PansiotNeighborhoods:
      return "pansiot-neighborhoods";
    case Theorem::IrrationalPfEigenvalue:
      return "irrational-pf-eigenvalue";
    case Theorem::DekkingHeight:
      return "dekking-height";
    case Theorem::DekkingCoincidence:
      return "dekking-coincidence";
    case Theorem::BijectiveStructure:
      return "bijective-no-coincidence";
    case Theorem::SqrtQCriterion:
      return "berlinkov-solomyak-sqrtq";
    case Theorem::BijectiveTwoLetter:
      return "bijective-two-letter-singular";
    case Theorem::SelfSimilarPisotWeakMixing:
      return "self-similar-pisot-weak-mixing";
    case Theorem::IrreduciblePisot:
      return "irreducible-pisot";
    case Theorem::PisotConjecture:
      return "pisot-discrete-spectrum-conjecture";
    case Theorem::LyapunovHalfLogTheta:
      return "lyapunov-half-log-theta";
    case Theorem::LyapunovUpperBound:
      return "lyapunov-log-theta-bound";
    case Theorem::ClarkSadunReturnWords:
      return "clark-sadun-return-words";
    case Theorem::LocalDimensionLyapunov:
      return "local-dimension-lyapunov";
    case Theorem::DimensionAtZero:
      return "dimension-at-zero";
    case Theorem::WienerPointMass:
      return "wiener-point-mass";
  }
  return "unknown";
}

std::vector<std::string> all_theorem_tags() {
  std::vector<std::string> out;
  for (int t = 0; t <= static_cast<int>(Theorem::WienerPointMass); ++t) out.emplace_back(theorem_tag(static_cast<Theorem>(t)));
  return out;
}

nlohmann::json to_json(const CriterionResult& c) {
  nlohmann::json j;
  j["id"] = c.id;
  j["verdict"] = to_string(c.verdict);
  j["theorem"] = theorem_tag(c.theorem);
  if (!c.statement.empty()) j["statement"] = c.statement;
  j["evidence"] = c.evidence;
  return j;
}

std::optional<int> constant_length(const Substitution& z) {
  const std::size_t q = z.rule(0).size();
  for (const auto& w : z.rules())
    if (w.size() != q) return std::nullopt;
  return static_cast<int>(q);
}

namespace {

int require_constant_length(const Substitution& z, const char* what) {
  const auto q = constant_length(z);
  if (!q) throw PreconditionError(std::string(what) + " requires a constant-length substitution");
  return *q;
}

std::int64_t coprime_part(std::int64_t g, std::int64_t q) {
  // Largest divisor of g coprime to q: strip every prime shared with q.
  if (g == 0) return 0;
  for (std::int64_t c = std::gcd(g, q); c > 1; c = std::gcd(g, q)) g /= c;
  return g;
}

}  // namespace

HeightResult height(const Substitution& z, std::size_t ell, const HeightConfig& cfg) {
  HeightResult res;
  res.q = require_constant_length(z, "height");
  res.position = ell;
  if (!is_primitive(z).primitive) throw PreconditionError("height requires a primitive substitution");
  const auto seed = default_fixed_point(z);
  std::size_t len = std::max<std::size_t>(4096, 4 * ell + 64);
  while (true) {
    len = std::min(len, std::max(cfg.max_prefix, ell + 2));
    const Word u = fixed_point_prefix(z, seed.letter, len);
    std::int64_t g = 0;
    int unchanged = 0;
    bool done = false;
    for (std::size_t j = ell + 1; j < u.size(); ++j) {
      if (u[j] != u[ell]) continue;
      const std::int64_t next = std::gcd(g, static_cast<std::int64_t>(j - ell));
      unchanged = next == g ? unchanged + 1 : 0;
      g = next;
      if (unchanged >= cfg.window) {
        done = true;
        break;
      }
    }
    res.g0 = g;
    if (done || len >= cfg.max_prefix) {
      res.confirmed = done;
      break;
    }
    len *= 2;
  }
  res.h = res.g0 > 0 ? coprime_part(res.g0, res.q) : 1;
  return res;
}

std::vector<ColumnMap> column_maps(const Substitution& z) {
  const int q = require_constant_length(z, "column maps");
  std::vector<ColumnMap> out(q, ColumnMap(z.size()));
  for (int a = 0; a < z.size(); ++a)
    for (int i = 0; i < q; ++i) out[i][a] = z.rule(a)[i];
  return out;
}

ColumnSemigroup close_semigroup(const std::vector<ColumnMap>& generators) {
  ColumnSemigroup sg;
  sg.generators = generators;
  std::set<ColumnMap> seen;
  for (const auto& g : generators)
    if (seen.insert(g).second) {
      sg.closure.push_back(g);
      sg.length.push_back(1);
    }
  // Breadth-first: element then generator, so lengths are minimal.
  for (std::size_t head = 0; head < sg.closure.size(); ++head) {
    const ColumnMap cur = sg.closure[head];
    const int len = sg.length[head];
    for (const auto& g : generators) {
      ColumnMap next(cur.size());
      for (std::size_t a = 0; a < cur.size(); ++a) next[a] = g[cur[a]];
      if (seen.insert(next).second) {
        sg.closure.push_back(std::move(next));
        sg.length.push_back(len + 1);
      }
    }
  }
  return sg;
}

ColumnSemigroup column_semigroup(const Substitution& z) { return close_semigroup(column_maps(z)); }

CoincidenceResult dekking_coincidence(const Substitution& z) {
  require_constant_length(z, "coincidence test");
  const auto h = height(z);
  if (h.h > 1)
    throw PreconditionError("coincidence test requires height one (height is " + std::to_string(h.h) +
                            "); reduction to the pure base is not performed");
  const auto sg = column_semigroup(z);
  CoincidenceResult res;
  res.closure_size = sg.closure.size();
  for (std::size_t i = 0; i < sg.closure.size(); ++i) {
    const auto& m = sg.closure[i];
    if (std::all_of(m.begin(), m.end(), [&](Letter x) { return x == m.front(); })) {
      res.coincidence = true;
      res.k = sg.length[i];
      break;
    }
  }
  return res;
}

const char* to_string(Bijectivity b) {
  switch (b) {
    case Bijectivity::NotBijective:
      return "not-bijective";
    case Bijectivity::Bijective:
      return "bijective";
    case Bijectivity::AbelianBijective:
      return "abelian-bijective";
  }
  return "not-bijective";
}

BijectivityResult bijectivity(const Substitution& z) {
  BijectivityResult res;
  res.columns = column_maps(z);
  for (const auto& c : res.columns) {
    std::vector<bool> hit(c.size(), false);
    for (Letter x : c) hit[x] = true;
    if (!std::all_of(hit.begin(), hit.end(), [](bool b) { return b; })) return res;
  }
  res.kind = Bijectivity::AbelianBijective;
  for (std::size_t i = 0; i < res.columns.size(); ++i)
    for (std::size_t j = i + 1; j < res.columns.size(); ++j) {
      const auto& f = res.columns[i];
      const auto& g = res.columns[j];
      for (std::size_t a = 0; a < f.size(); ++a)
        if (f[g[a]] != g[f[a]]) {
          res.kind = Bijectivity::Bijective;
          return res;
        }
    }
  return res;
}

namespace {

bool by_modulus_desc(const std::complex<double>& a, const std::complex<double>& b) {
  if (std::abs(a) != std::abs(b)) return std::abs(a) > std::abs(b);
  if (a.real() != b.real()) return a.real() > b.real();
  return a.imag() > b.imag();
}

nlohmann::json complex_list(const std::vector<std::complex<double>>& v) {
  auto arr = nlohmann::json::array();
  for (const auto& z : v) arr.push_back({{"re", z.real()}, {"im", z.imag()}, {"abs", std::abs(z)}});
  return arr;
}

nlohmann::json poly_json(const IntPoly& p) {
  return {{"coefficients", p.coeffs()}, {"text", p.to_string()}};
}

}  // namespace

PisotReport pisot_report(const Substitution& z) {
  const auto pd = perron_data(z);
  const IntMatrix s = substitution_matrix(z);
  PisotReport rep;
  rep.theta = pd.theta;
  rep.charpoly = characteristic_polynomial(s);
  rep.trace = s.trace();
  {
    const int d = z.size();
    rep.det = (d % 2 == 0 ? 1 : -1) * rep.charpoly[0];
  }
  const auto fac = factor_monic(rep.charpoly);
  rep.factors = fac.factors;
  if (fac.complete) rep.irreducible = fac.factors.size() == 1;
  else rep.flags.push_back("degree beyond exact factorization bound; irreducibility inconclusive");

  long double best = std::numeric_limits<long double>::infinity();
  for (const auto& f : rep.factors) {
    for (const auto& r : f.roots()) rep.eigenvalues.push_back(r);
    const long double v = std::abs(f.eval(rep.theta)) / std::max(1.0L, std::abs(rep.theta));
    if (v < best) {
      best = v;
      rep.pf_minimal_polynomial = f;
    }
  }
  std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end(), by_modulus_desc);
  auto conj = rep.pf_minimal_polynomial.roots();
  std::sort(conj.begin(), conj.end(), by_modulus_desc);
  if (!conj.empty()) conj.erase(conj.begin());  // the PF root itself
  rep.pf_conjugates = conj;
  rep.pf_is_pisot = true;
  for (const auto& c : conj) {
    const double m = std::abs(c);
    if (std::abs(m - 1.0) < 1e-9) rep.flags.push_back("conjugate of modulus within 1e-9 of one");
    if (m >= 1.0 - 1e-9) rep.pf_is_pisot = false;
  }
  // Irreducible Pisot: every eigenvalue of S other than theta inside the disk.
  rep.irreducible_pisot = rep.irreducible.value_or(false) && rep.pf_is_pisot;
  return rep;
}

CriterionResult weak_mixing_selfsimilar(const Substitution& z) {
  const auto rep = pisot_report(z);
  CriterionResult c;
  c.id = "weak-mixing-self-similar";
  c.theorem = Theorem::SelfSimilarPisotWeakMixing;
  const auto ap = aperiodicity_verdict(z);
  if (ap.verdict == Aperiodicity::Periodic) {
    c.verdict = Verdict::NotApplicable;
    c.statement = "periodic substitution";
    return c;
  }
  c.verdict = rep.pf_is_pisot ? Verdict::Fails : Verdict::Holds;
  c.statement = rep.pf_is_pisot ? "not weakly mixing (theta is Pisot)" : "weakly mixing (theta is not Pisot)";
  c.evidence["theta"] = static_cast<double>(rep.theta);
  c.evidence["pf_minimal_polynomial"] = poly_json(rep.pf_minimal_polynomial);
  c.evidence["conjugates"] = complex_list(rep.pf_conjugates);
  if (ap.verdict == Aperiodicity::Unknown) {
    c.verdict = Verdict::Inconclusive;
    c.statement += "; aperiodicity unknown";
  }
  return c;
}

CriterionResult sqrtq_singularity(const Substitution& z) {
  const int q = require_constant_length(z, "sqrt(q) criterion");
  const IntPoly cp = characteristic_polynomial(substitution_matrix(z));
  CriterionResult c;
  c.id = "sqrtq-singularity";
  c.theorem = Theorem::SqrtQCriterion;
  const double rq = std::sqrt(static_cast<double>(q));
  std::vector<std::string> exact;
  if (cp.divisible_by(IntPoly({-q, 0, 1}))) exact.push_back(IntPoly({-q, 0, 1}).to_string());
  const auto tmax = static_cast<std::int64_t>(std::floor(2.0 * rq + 1e-12));
  for (std::int64_t t = -tmax; t <= tmax; ++t) {
    if (t * t > 4LL * q) continue;
    const IntPoly f({q, -t, 1});
    if (cp.divisible_by(f)) exact.push_back(f.to_string());
  }
  const auto sq = static_cast<std::int64_t>(std::llround(rq));
  if (sq * sq == q)
    for (std::int64_t sgn : {1, -1})
      if (cp.divisible_by(IntPoly({-sgn * sq, 1}))) exact.push_back(IntPoly({-sgn * sq, 1}).to_string());
  std::vector<std::complex<double>> near;
  for (const auto& r : cp.roots())
    if (std::abs(std::abs(r) - rq) < 1e-6 * rq) near.push_back(r);
  c.evidence["q"] = q;
  c.evidence["charpoly"] = poly_json(cp);
  c.evidence["exact_factors_with_modulus_sqrtq"] = exact;
  c.evidence["eigenvalues_near_sqrtq"] = complex_list(near);
  if (!exact.empty()) {
    c.verdict = Verdict::Inconclusive;
    c.statement = "an eigenvalue has modulus sqrt(q); the criterion does not apply";
  } else if (!near.empty()) {
    c.verdict = Verdict::Inconclusive;
    c.statement = "eigenvalue modulus within tolerance of sqrt(q) without an exact quadratic factor";
  } else {
    c.verdict = Verdict::Holds;
    c.statement = "singular maximal spectral type";
  }
  return c;
}

std::vector<int> two_letter_signs(const Substitution& z) {
  const auto b = bijectivity(z);
  if (z.size() != 2 || b.kind == Bijectivity::NotBijective)
    throw PreconditionError("requires a bijective constant-length substitution on two letters");
  // z(1) is the letter-swap of z(0), so z(0) alone determines F.
  std::vector<int> signs;
  for (Letter x : z.rule(0)) signs.push_back(x == 0 ? 1 : -1);
  return signs;
}

double two_letter_polynomial(const std::vector<int>& signs, double omega) {
  std::complex<double> f = 0;
  for (std::size_t k = 0; k < signs.size(); ++k)
    f += static_cast<double>(signs[k]) * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k) * omega);
  return std::norm(f) / static_cast<double>(signs.size());
}

CriterionResult bijective_two_letter_singularity(const Substitution& z) {
  if (!is_primitive(z).primitive) throw PreconditionError("requires a primitive substitution");
  const auto signs = two_letter_signs(z);
  const int q = static_cast<int>(signs.size());
  CriterionResult c;
  c.id = "bijective-two-letter";
  c.theorem = Theorem::BijectiveTwoLetter;
  c.verdict = Verdict::Holds;
  c.statement = "purely singular spectrum";
  double dev = 0;
  const int grid = 256;
  for (int i = 0; i < grid; ++i) {
    const double w = static_cast<double>(i) / grid;
    double acc = 0;
    for (int j = 0; j < q; ++j) acc += two_letter_polynomial(signs, (w + j) / q);
    dev = std::max(dev, std::abs(acc - q));
  }
  c.evidence["signs"] = signs;
  c.evidence["partition_identity_max_deviation"] = dev;
  c.evidence["partition_grid"] = grid;
  return c;
}

SpectrumVerdict spectrum_summary(const Substitution& z) {
  SpectrumVerdict sv;
  const auto prim = is_primitive(z);
  {
    CriterionResult c;
    c.id = "primitive";
    c.theorem = Theorem::Primitivity;
    c.verdict = prim.primitive ? Verdict::Holds : Verdict::Fails;
    c.evidence["exponent"] = prim.exponent;
    sv.criteria.push_back(c);
  }
  if (!prim.primitive) {
    sv.headline = "not primitive; no spectral analysis";
    return sv;
  }
  const auto ap = aperiodicity_verdict(z);
  const bool cl = constant_length(z).has_value();
  {
    CriterionResult c;
    c.id = "aperiodic";
    c.theorem = cl ? Theorem::PansiotNeighborhoods : Theorem::IrrationalPfEigenvalue;
    c.verdict = ap.verdict == Aperiodicity::Aperiodic ? Verdict::Holds
                : ap.verdict == Aperiodicity::Periodic ? Verdict::Fails
                                                        : Verdict::Inconclusive;
    c.statement = ap.reason;
    c.evidence["tests_run"] = ap.tests_run;
    if (ap.period) c.evidence["period"] = *ap.period;
    sv.criteria.push_back(c);
  }
  if (ap.verdict == Aperiodicity::Periodic) {
    sv.headline = "periodic: discrete spectrum with finitely many eigenvalues";
    return sv;
  }

  const auto rep = pisot_report(z);
  {
    CriterionResult c;
    c.id = "irreducible-pisot";
    c.theorem = Theorem::IrreduciblePisot;
    c.verdict = !rep.irreducible ? Verdict::Inconclusive : rep.irreducible_pisot ? Verdict::Holds : Verdict::Fails;
    c.evidence["charpoly"] = poly_json(rep.charpoly);
    auto fs = nlohmann::json::array();
    for (const auto& f : rep.factors) fs.push_back(poly_json(f));
    c.evidence["factors"] = fs;
    c.evidence["pf_is_pisot"] = rep.pf_is_pisot;
    c.evidence["eigenvalues"] = complex_list(rep.eigenvalues);
    sv.criteria.push_back(c);
  }
  const auto wm = weak_mixing_selfsimilar(z);
  sv.criteria.push_back(wm);

  if (!cl) {
    if (rep.irreducible_pisot) {
      CriterionResult c;
      c.id = "pure-discrete-spectrum";
      c.theorem = Theorem::PisotConjecture;
      c.verdict = Verdict::Inconclusive;
      c.statement = "conjectured for irreducible Pisot substitutions; not decided here";
      sv.criteria.push_back(c);
      sv.headline = "Pisot case: not weakly mixing; pure discreteness open";
    } else if (wm.verdict == Verdict::Holds) {
      sv.headline = "self-similar suspension weakly mixing; singularity needs the Lyapunov criterion";
    } else {
      sv.headline = "non-constant length; discrete component present, type of continuous part undecided";
    }
    return sv;
  }

  const int q = *constant_length(z);
  const auto h = height(z);
  sv.eigenvalue_group = "e(Z(" + std::to_string(q) + ") x Z/" + std::to_string(h.h) + "Z)";
  {
    CriterionResult c;
    c.id = "height";
    c.theorem = Theorem::DekkingHeight;
    c.verdict = h.confirmed ? Verdict::Holds : Verdict::Inconclusive;
    c.statement = h.confirmed ? "height " + std::to_string(h.h) : "height: unconfirmed";
    c.evidence["q"] = q;
    c.evidence["g0"] = h.g0;
    c.evidence["h"] = h.h;
    c.evidence["eigenvalue_group"] = *sv.eigenvalue_group;
    sv.criteria.push_back(c);
  }
  std::optional<bool> coin;
  {
    CriterionResult c;
    c.id = "coincidence";
    c.theorem = Theorem::DekkingCoincidence;
    if (h.h > 1) {
      c.verdict = Verdict::NotApplicable;
      c.statement = "height > 1; reduction to the pure base not performed";
    } else {
      const auto dc = dekking_coincidence(z);
      coin = dc.coincidence;
      c.verdict = dc.coincidence ? Verdict::Holds : Verdict::Fails;
      c.statement = dc.coincidence ? "purely discrete spectrum" : "no coincidence; spectrum not purely discrete";
      c.evidence["k"] = dc.k;
      c.evidence["closure_size"] = dc.closure_size;
    }
    sv.criteria.push_back(c);
  }
  const auto bij = bijectivity(z);
  {
    CriterionResult c;
    c.id = "bijective";
    c.theorem = Theorem::BijectiveStructure;
    c.verdict = bij.kind == Bijectivity::NotBijective ? Verdict::Fails : Verdict::Holds;
    c.statement = to_string(bij.kind);
    c.evidence["abelian"] = bij.kind == Bijectivity::AbelianBijective;
    sv.criteria.push_back(c);
  }
  const auto sq = sqrtq_singularity(z);
  sv.criteria.push_back(sq);
  if (z.size() == 2 && bij.kind != Bijectivity::NotBijective) sv.criteria.push_back(bijective_two_letter_singularity(z));

  if (coin && *coin) {
    sv.headline = "discrete (coincidence)";
  } else if (sq.verdict == Verdict::Holds) {
    sv.headline = "mixed: discrete component " + *sv.eigenvalue_group + " plus singular continuous part";
  } else {
    sv.headline = "mixed: discrete component " + *sv.eigenvalue_group + "; singularity criterion inconclusive";
  }
  if (coin && *coin && sq.verdict == Verdict::Holds) sv.headline += "; sqrt(q) criterion also fires";
  return sv;
}

PowerDistances pisot_power_distances(const IntPoly& minpoly, const std::vector<std::int64_t>& x, int K) {
  if (K < 0 || K > 60) throw PreconditionError("power distances need 0 <= K <= 60");
  if (minpoly.leading() != 1) throw PreconditionError("minimal polynomial must be monic");
  auto roots = minpoly.roots();
  std::sort(roots.begin(), roots.end(), by_modulus_desc);
  PowerDistances out;
  out.exact = true;
  // Refine the conjugates in long double: their powers are what we sum.
  std::vector<std::complex<long double>> conj;
  for (std::size_t i = 1; i < roots.size(); ++i) {
    std::complex<long double> r(roots[i].real(), roots[i].imag());
    for (int it = 0; it < 8; ++it) {
      std::complex<long double> dp = 0;
      for (int j = minpoly.degree(); j >= 1; --j) dp = dp * r + static_cast<long double>(minpoly[j]) * static_cast<long double>(j);
      if (std::abs(dp) == 0) break;
      r -= minpoly.eval(r) / dp;
    }
    conj.push_back(r);
  }
  for (int k = 0; k <= K; ++k) {
    std::complex<long double> acc = 0;
    for (const auto& r : conj)
      for (std::size_t i = 0; i < x.size(); ++i)
        acc += static_cast<long double>(x[i]) * std::pow(r, static_cast<long double>(k + i));
    // theta^k x = trace - acc, trace an integer.
    const long double v = -acc.real();
    const long double frac = v - std::floor(v);
    out.distance.push_back(std::min(frac, 1.0L - frac));
  }
  return out;
}

PowerDistances power_distances_real(long double theta, long double x, int K) {
  PowerDistances out;
  long double v = x;
  for (int k = 0; k <= K; ++k) {
    const long double frac = v - std::floor(v);
    out.distance.push_back(std::min(frac, 1.0L - frac));
    v *= theta;
  }
  return out;
}

BernoulliValue bernoulli_fourier(double lambda, double p, double xi, int n_terms) {
  if (!(lambda > 0 && lambda < 1) || !(p > 0 && p < 1)) throw PreconditionError("need lambda, p in (0,1)");
  if (n_terms < 0 || n_terms > 10000) throw PreconditionError("need 0 <= terms <= 10000");
  std::complex<long double> acc = 1;
  long double t = xi;
  const long double tau = 2.0L * std::numbers::pi_v<long double>;
  for (int n = 0; n < n_terms; ++n) {
    const std::complex<long double> e = std::polar(1.0L, -tau * t);
    acc *= static_cast<long double>(p) * e + static_cast<long double>(1 - p) * std::conj(e);
    t *= lambda;
  }
  BernoulliValue out;
  out.value = {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
  out.tail_bound = static_cast<double>(tau * std::abs(static_cast<long double>(xi)) * std::pow(static_cast<long double>(lambda), n_terms) /
                                       (1.0L - lambda));
  return out;
}

}  // namespace subspec
